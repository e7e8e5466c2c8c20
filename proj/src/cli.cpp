#include "strips11/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "strips11/bounds.hpp"
#include "strips11/format.hpp"
#include "strips11/generators.hpp"
#include "strips11/litgraph.hpp"
#include "strips11/mapf.hpp"
#include "strips11/petri.hpp"
#include "strips11/satgen.hpp"
#include "strips11/search.hpp"

namespace strips11::cli {

namespace {

using nlohmann::json;

// Usage-level failure raised after parsing (bad flag combination, bad file).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Domain-level failure without a more specific exception.
class Failure : public Error {
 public:
  using Error::Error;
};

json instance_json(const Instance& p) {
  json j;
  j["vars"] = p.n;
  j["init"] = p.init.to_string();
  if (p.goal) j["goal"] = p.goal->to_string();
  auto& acts = j["actions"] = json::array();
  for (const Action& a : p.actions) acts.push_back({a.pre.to_signed(), a.eff.to_signed()});
  return j;
}

State parse_state(const std::string& bits, int n, const char* what) {
  State s;
  try {
    s = State::from_string(bits);
  } catch (const InvalidArgument& e) {
    throw UsageError(fmt::format("--{}: {}", what, e.what()));
  }
  if (s.width() != n) {
    throw UsageError(fmt::format("--{} has {} bits but the instance has {} variables", what, s.width(), n));
  }
  return s;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    save_text(path, text);
  }
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::kSat: return "sat";
    case SolveStatus::kUnsat: return "unsat";
    case SolveStatus::kUnknown: break;
  }
  return "unknown";
}

std::string plan_text(const Plan& plan) {
  std::string s;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    s += fmt::format("{}a{}", i ? " " : "", plan.steps[i]);
  }
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string::npos ? s.size() : comma;
    if (end > start) out.push_back(s.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string default_solver() {
  const char* env = std::getenv(kSolverEnv);
  return env ? env : "";
}

struct Common {
  bool json = false;
  int threads = 1;
};

void add_common(CLI::App* sub, Common& c, bool with_threads) {
  sub->add_flag("--json", c.json, "Print results as JSON");
  if (with_threads) {
    sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::Range(1, 256));
  }
}

// ---------------------------------------------------------------------------

struct GenArgs {
  Common c;
  std::string family = "P";
  int n = 0;
  std::string out;
};

int do_gen(const GenArgs& a, std::ostream& out) {
  if (a.family != "P") throw UsageError("only the P family is generated");
  const Instance p = gen_P(a.n);
  if (a.c.json) {
    emit(out, instance_json(p));
    if (!a.out.empty()) save_text(a.out, serialize_instance(p));
  } else {
    write_or_print(a.out, serialize_instance(p), out);
  }
  return kOk;
}

struct SolveArgs {
  Common c;
  std::string instance;
  std::string start;
  std::string goal;
  bool ecc = false;
  std::string emit_plan;
  int max_vars = 26;
};

int do_solve(const SolveArgs& a, std::ostream& out) {
  if (a.ecc && !a.goal.empty()) throw UsageError("--ecc and --goal are exclusive");
  Instance p = load_instance(a.instance);
  SearchOptions opts;
  opts.max_vars = a.max_vars;
  opts.threads = a.c.threads;
  if (!a.start.empty()) p.init = parse_state(a.start, p.n, "start");
  if (!a.goal.empty()) p.goal = parse_state(a.goal, p.n, "goal");

  if (a.ecc || !p.goal) {
    const DistanceMap dm = bfs_from(p, p.init, opts);
    const Eccentricity e = eccentricity(dm);
    json j;
    j["start"] = p.init.to_string();
    j["eccentricity"] = e.value;
    j["reached"] = dm.reached_count();
    auto& far = j["farthest"] = json::array();
    for (const State& s : e.farthest) far.push_back(s.to_string());
    if (!a.emit_plan.empty()) {
      const Plan plan = extract_shortest_plan(dm, e.farthest.front());
      Instance q = p;
      q.goal = e.farthest.front();
      save_text(a.emit_plan, plan_to_json(plan, validate_plan(q, plan)).dump() + "\n");
    }
    if (a.c.json) {
      emit(out, j);
    } else {
      out << fmt::format("eccentricity {} from {} ({} states reached)\n", e.value, p.init.to_string(),
                         dm.reached_count());
      for (const State& s : e.farthest) out << "farthest " << s.to_string() << '\n';
    }
    return kOk;
  }

  const Plan plan = extract_shortest_plan(p, p.init, *p.goal, opts);
  const Trace trace = validate_plan(p, plan);
  if (!a.emit_plan.empty()) save_text(a.emit_plan, plan_to_json(plan, trace).dump() + "\n");
  if (a.c.json) {
    json j = plan_to_json(plan, trace);
    j["length"] = plan.length();
    emit(out, j);
  } else {
    out << fmt::format("plan of length {}: {}\n", plan.length(), plan_text(plan));
  }
  return kOk;
}

struct OracleArgs {
  Common c;
  int n = 0;
  std::optional<std::uint64_t> samples;
  std::uint64_t seed = 0;
  std::string out;
};

int do_oracle(const OracleArgs& a, std::ostream& out) {
  ExhaustiveOptions opts;
  opts.threads = a.c.threads;
  opts.samples = a.samples;
  opts.seed = a.seed;
  const ExhaustiveResult r = exhaustive_max(a.n, opts);
  json j;
  j["n"] = r.n;
  j["value"] = r.value;
  j["exhaustive"] = r.exhaustive;
  j["subsets_evaluated"] = r.subsets_evaluated;
  j["witness_mask"] = r.witness_mask;
  j["witness"] = instance_json(r.witness);
  if (r.exhaustive) j["histogram"] = r.histogram;
  if (!a.out.empty()) save_text(a.out, j.dump(2) + "\n");
  if (a.c.json) {
    emit(out, j);
  } else {
    out << fmt::format("n={} max eccentricity {} ({}, {} subsets)\n", r.n, r.value,
                       r.exhaustive ? "exhaustive" : "sampled", r.subsets_evaluated);
    out << serialize_instance(r.witness);
  }
  return kOk;
}

struct BoundsArgs {
  Common c;
  std::string instance;
  std::string start;
  std::string goal;
  bool require_good = false;
};

int do_bounds(const BoundsArgs& a, std::ostream& out) {
  if (a.start.empty() != a.goal.empty()) throw UsageError("--start and --goal go together");
  const Instance p = load_instance(a.instance);
  if (!p.canonical()) throw UsageError("bounds needs a canonical instance");
  const bool good = is_good(p);
  json j;
  j["good"] = good;
  std::vector<int> bad_vars;
  for (int v = 0; v < p.n; ++v) {
    if (!is_good_variable(p, v)) bad_vars.push_back(v);
  }
  j["variables_not_good"] = bad_vars;
  const BidirReport r = bidirectional_report(p);
  j["bidirectional"] = {{"per_coordinate", r.per_coordinate},
                        {"total", r.total},
                        {"heavy_vertices", r.heavy_count},
                        {"coordinate_bound_ok", r.lemma_coordinates_ok},
                        {"heavy_bound_ok", r.lemma_heavy_ok}};
  bool violated = good && !(r.lemma_coordinates_ok && r.lemma_heavy_ok);
  std::optional<OmissionReport> om;
  if (!a.start.empty() && good) {
    SearchOptions opts;
    opts.threads = a.c.threads;
    om = check_omission(p, parse_state(a.start, p.n, "start"), parse_state(a.goal, p.n, "goal"), opts);
    j["omission"] = {{"plan_length", om->plan_length},
                     {"visited", om->visited},
                     {"omitted", om->omitted},
                     {"required", om->required},
                     {"theorem_ok", om->theorem_ok}};
    violated = violated || !om->theorem_ok;
  }
  if (a.c.json) {
    emit(out, j);
  } else {
    out << (good ? "good\n" : "not good\n");
    for (int v : bad_vars) out << fmt::format("  variable v{} lacks a valid achiever pair\n", v);
    for (std::size_t v = 0; v < r.per_coordinate.size(); ++v) {
      out << fmt::format("bidirectional v{}: {}\n", v, r.per_coordinate[v]);
    }
    out << fmt::format("heavy vertices: {}\n", r.heavy_count);
    if (om) {
      out << fmt::format("plan length {} visits {} states, omits {} (required {}): {}\n", om->plan_length,
                         om->visited, om->omitted, om->required, om->theorem_ok ? "ok" : "VIOLATED");
    }
  }
  if (!a.start.empty() && !good) throw NotGood("omission check needs a good instance");
  if (a.require_good && !good) return kDomainFailure;
  return violated ? kDomainFailure : kOk;
}

struct AnalyzeArgs {
  std::string instance;
  std::string plan;
  std::string dot_graph;
  std::string dot_tree;
  std::string json_path;
  bool json = false;
};

int do_analyze(const AnalyzeArgs& a, std::ostream& out) {
  Instance p = load_instance(a.instance);
  const Plan plan = plan_from_json(json::parse(load_text(a.plan)));
  if (!p.goal) p.goal = validate_plan(p, plan).final_state();
  const GoalSubplans subs = goal_subplans(p, plan);
  const LiteralGraph g = build_literal_graph(p);
  const OverlapTree tree = build_overlap_tree(subs);
  const DivergenceReport div = divergence_report(subs, plan);
  if (!a.dot_graph.empty()) save_text(a.dot_graph, export_dot(g, plan, subs));
  if (!a.dot_tree.empty()) save_text(a.dot_tree, export_dot(tree, plan));

  json j;
  j["plan_length"] = plan.length();
  j["literal_graph"] = {{"nodes", g.node_count()}, {"edges", g.edges.size()}};
  auto& js = j["goal_subplans"] = json::object();
  for (const auto& [lit, sp] : subs) {
    js[lit.to_string()] = {{"positions", sp.positions}, {"actions", sp.actions(plan)}};
  }
  j["overlap_tree"] = {{"nodes", tree.nodes.size()},
                       {"edges", tree.edge_count()},
                       {"terminals", tree.terminal_count()}};
  auto& shared = j["shared_after_divergence"] = json::array();
  for (const auto& s : div.shared_after_divergence) {
    shared.push_back({{"first", s.first.to_string()}, {"second", s.second.to_string()}, {"action", s.action}});
  }
  if (a.json) {
    if (a.json_path.empty() || a.json_path == "-") {
      emit(out, j);
    } else {
      save_text(a.json_path, j.dump(2) + "\n");
    }
  }
  if (!a.json || (!a.json_path.empty() && a.json_path != "-")) {
    out << fmt::format("plan length {}, overlap tree with {} edges and {} terminals\n", plan.length(),
                       tree.edge_count(), tree.terminal_count());
    for (const auto& [lit, sp] : subs) {
      out << fmt::format("{}: {} steps\n", lit.to_string(), sp.positions.size());
    }
    out << fmt::format("{} subplan pairs share an action after diverging\n", div.shared_after_divergence.size());
  }
  return kOk;
}

struct EncodeArgs {
  Common c;
  int n = 0;
  int len = 0;
  std::string out;
};

int do_encode(const EncodeArgs& a, std::ostream& out) {
  const CnfArtifact cnf = encode(a.n, a.len);
  const std::string text = write_dimacs(cnf);
  if (a.c.json) {
    if (a.out.empty()) throw UsageError("--json needs --out for the CNF text");
    save_text(a.out, text);
    emit(out, {{"n", a.n}, {"len", a.len}, {"vars", cnf.num_vars()}, {"clauses", cnf.clauses.size()},
               {"out", a.out}});
  } else {
    write_or_print(a.out, text, out);
  }
  return kOk;
}

struct DecodeArgs {
  Common c;
  std::string cnf;
  std::string model;
  std::string emit = "instance+plan";
  std::string out_instance;
  std::string out_plan;
};

int do_decode(const DecodeArgs& a, std::ostream& out) {
  const CnfArtifact cnf = parse_dimacs(load_text(a.cnf));
  const SolverOutput so = parse_solver_output(load_text(a.model), cnf.num_vars());
  if (so.status != SolveStatus::kSat || !so.model) {
    throw Failure(fmt::format("model file reports {}", status_name(so.status)));
  }
  const Decoded d = decode(*so.model, cnf);
  const bool certified = verify_certificate(d.instance, d.plan, static_cast<std::uint64_t>(cnf.layout.length));
  const Trace trace = validate_plan(d.instance, d.plan);
  const bool want_instance = a.emit.find("instance") != std::string::npos;
  const bool want_plan = a.emit.find("plan") != std::string::npos;
  if (!want_instance && !want_plan) throw UsageError("--emit takes instance, plan or instance+plan");
  if (!a.out_instance.empty()) save_text(a.out_instance, serialize_instance(d.instance));
  if (!a.out_plan.empty()) save_text(a.out_plan, plan_to_json(d.plan, trace).dump() + "\n");
  if (a.c.json) {
    json j{{"status", "sat"}, {"certified", certified}, {"length", d.plan.length()}};
    if (want_instance) j["instance"] = instance_json(d.instance);
    if (want_plan) j["plan"] = plan_to_json(d.plan, trace);
    emit(out, j);
  } else {
    if (want_instance) out << serialize_instance(d.instance);
    if (want_plan) out << plan_to_json(d.plan, trace).dump() << '\n';
    out << fmt::format("certificate {}\n", certified ? "verified" : "FAILED");
  }
  return certified ? kOk : kDomainFailure;
}

struct SweepArgs {
  Common c;
  int n = 0;
  int from = 1;
  std::optional<int> to;
  std::string solver = default_solver();
  std::string workdir;
  std::string out_instance;
  std::string out_plan;
};

int do_sweep(const SweepArgs& a, std::ostream& out) {
  if (a.solver.empty()) throw UsageError(fmt::format("no solver: pass --solver or set {}", kSolverEnv));
  if (a.to && *a.to < a.from) throw UsageError("--to must be at least --from");
  const std::string workdir =
      a.workdir.empty() ? (std::filesystem::temp_directory_path() / "strips11-sweep").string() : a.workdir;
  const SweepResult r = sweep(a.n, a.from, a.to, a.solver, workdir);
  if (r.certificate) {
    if (!a.out_instance.empty()) save_text(a.out_instance, serialize_instance(r.certificate->instance));
    if (!a.out_plan.empty()) {
      save_text(a.out_plan,
                plan_to_json(r.certificate->plan, validate_plan(r.certificate->instance, r.certificate->plan)).dump() +
                    "\n");
    }
  }
  if (a.c.json) {
    json j;
    j["n"] = a.n;
    auto& steps = j["steps"] = json::array();
    for (const SweepStep& s : r.steps) {
      steps.push_back({{"len", s.length}, {"status", status_name(s.status)}, {"certified", s.certified},
                       {"seconds", s.seconds}});
    }
    j["best"] = r.best ? json(*r.best) : json(nullptr);
    if (r.certificate) {
      j["certificate"] = {{"instance", instance_json(r.certificate->instance)},
                          {"plan", r.certificate->plan.steps}};
    }
    emit(out, j);
  } else {
    for (const SweepStep& s : r.steps) {
      out << fmt::format("len {:3}: {:7} {:8.2f}s{}\n", s.length, status_name(s.status), s.seconds,
                         s.certified ? " certified" : "");
    }
    if (r.best) {
      out << fmt::format("largest satisfiable length {}\n", *r.best);
      out << serialize_instance(r.certificate->instance);
      out << "plan " << plan_text(r.certificate->plan) << '\n';
    } else {
      out << "no satisfiable length\n";
    }
  }
  return r.best ? kOk : kDomainFailure;
}

struct CompileArgs {
  Common c;
  std::string target;
  std::string instance;
  std::string out;
};

int do_compile(const CompileArgs& a, std::ostream& out, std::ostream& err) {
  Instance p = load_instance(a.instance);
  if (!p.canonical()) {
    err << "note: instance rewritten into canonical form before compiling\n";
    p = normalize(p);
  }
  json j;
  if (a.target == "petri") {
    const CompiledPetri c = compile_petri(p);
    j = petri_to_json(c.net, c.initial, c.goal);
  } else {
    j = mapf_to_json(compile_mapf(p));
  }
  write_or_print(a.out, j.dump(2) + "\n", out);
  if (!a.out.empty() && !a.c.json) {
    out << fmt::format("wrote {} net to {}\n", a.target, a.out);
  }
  return kOk;
}

struct PetriArgs {
  Common c;
  std::string net;
  std::string check;
  std::size_t limit = std::size_t{1} << 22;
};

int do_petri(const PetriArgs& a, std::ostream& out) {
  const CompiledPetri c = petri_from_json(json::parse(load_text(a.net)));
  const auto wanted = split_list(a.check);
  for (const auto& w : wanted) {
    if (w != "safe" && w != "conservative") throw UsageError("--check takes safe and/or conservative");
  }
  json j;
  bool ok = true;
  bool safe = true;
  for (const auto& w : wanted) {
    const bool holds = w == "safe" ? check_safe(c.net, c.initial, a.limit)
                                   : check_conservative(c.net, c.initial, a.limit);
    if (w == "safe") safe = holds;
    j["checks"][w] = holds;
    ok = ok && holds;
  }
  if (safe) {
    const auto reach = petri_reach(c.net, c.initial, a.limit);
    std::uint32_t depth = 0;
    for (const auto& [m, d] : reach) depth = std::max(depth, d);
    j["reachable"] = reach.size();
    j["max_depth"] = depth;
    if (!c.goal.tokens.empty()) {
      const auto it = reach.find(c.goal);
      j["goal_depth"] = it == reach.end() ? json(nullptr) : json(it->second);
    }
  }
  if (a.c.json) {
    emit(out, j);
  } else {
    for (const auto& w : wanted) out << fmt::format("{}: {}\n", w, j["checks"][w].get<bool>() ? "yes" : "no");
    if (j.contains("reachable")) {
      out << fmt::format("{} reachable markings, max depth {}\n", j["reachable"].get<std::size_t>(),
                         j["max_depth"].get<std::uint32_t>());
      if (j.contains("goal_depth")) {
        out << (j["goal_depth"].is_null() ? std::string("goal marking unreachable\n")
                                          : fmt::format("goal marking at depth {}\n", j["goal_depth"].get<int>()));
      }
    }
  }
  return ok ? kOk : kDomainFailure;
}

struct MapfArgs {
  Common c;
  std::string problem;
  int horizon = 64;
  std::string emit;
  std::string validate;
  std::size_t budget = CbsOptions{}.node_budget;
};

int do_mapf(const MapfArgs& a, std::ostream& out) {
  const MapfProblem m = mapf_from_json(json::parse(load_text(a.problem)));
  if (!a.validate.empty()) {
    const std::string text = load_text(a.validate);
    const auto first = text.find_first_not_of(" \t\r\n");
    const Schedule s = first != std::string::npos && text[first] == '{' ? schedule_from_json(json::parse(text))
                                                                          : parse_agent_listing(text);
    const ScheduleCheck chk = validate_schedule(m, s);
    if (a.c.json) {
      emit(out, {{"valid", chk.ok}, {"makespan", s.makespan()}, {"violation", chk.violation}});
    } else {
      out << (chk.ok ? fmt::format("valid schedule, makespan {}\n", s.makespan()) : "invalid: " + chk.violation + "\n");
    }
    return chk.ok ? kOk : kDomainFailure;
  }
  CbsOptions opts;
  opts.node_budget = a.budget;
  CbsStats stats;
  const Schedule s = cbs_solve(m, a.horizon, opts, &stats);
  if (!a.emit.empty()) save_text(a.emit, schedule_to_json(s).dump(2) + "\n");
  if (a.c.json) {
    json j = schedule_to_json(s);
    j["expanded"] = stats.expanded;
    j["generated"] = stats.generated;
    emit(out, j);
  } else {
    out << fmt::format("makespan {} ({} constraint nodes expanded)\n", s.makespan(), stats.expanded);
    for (int ag = 0; ag < m.agents; ++ag) {
      out << fmt::format("Agent {}:", ag);
      for (int node : s.positions[static_cast<std::size_t>(ag)]) out << fmt::format(" {}", node);
      out << '\n';
    }
  }
  return kOk;
}

struct ReproArgs {
  Common c;
  bool table1 = false;
  int max_n = 16;
};

int do_repro(const ReproArgs& a, std::ostream& out) {
  if (!a.table1) throw UsageError("nothing to reproduce; pass --table1");
  SearchOptions opts;
  opts.record_parents = false;
  opts.threads = a.c.threads;
  json rows = json::array();
  bool ok = true;
  std::string ns = "n   ";
  std::string ls = "l_P ";
  for (int n = 6; n <= a.max_n; ++n) {
    const Eccentricity e = eccentricity(gen_P(n), State::zeros(n), opts);
    const auto known = known_length_P(n);
    const auto predicted = predicted_length_P(n).length;
    const bool far_ok = std::ranges::binary_search(e.farthest, predicted_far_state(n));
    const bool row_ok = static_cast<std::int64_t>(e.value) == predicted &&
                        (!known || static_cast<std::int64_t>(e.value) == *known) && far_ok;
    ok = ok && row_ok;
    rows.push_back({{"n", n},
                    {"computed", e.value},
                    {"expected", known ? json(*known) : json(nullptr)},
                    {"predicted", predicted},
                    {"far_state_ok", far_ok},
                    {"ok", row_ok}});
    ns += fmt::format("{:>5}", n);
    ls += fmt::format("{:>5}", e.value);
  }
  if (a.c.json) {
    emit(out, {{"table1", rows}, {"ok", ok}});
  } else {
    out << ns << '\n' << ls << '\n' << (ok ? "matches\n" : "MISMATCH\n");
  }
  return ok ? kOk : kDomainFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Longest shortest plans in one-precondition one-effect STRIPS", "strips11"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a scaling family instance");
  add_common(g, gen.c, false);
  g->add_option("--family", gen.family, "Family name")->check(CLI::IsMember({"P"}));
  g->add_option("--n", gen.n, "Variables")->required()->check(CLI::Range(4, kMaxVars));
  g->add_option("--out", gen.out, "Output file (default stdout)");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Shortest plan or eccentricity by BFS");
  add_common(s, solve.c, true);
  s->add_option("--instance", solve.instance)->required();
  s->add_option("--start", solve.start, "Start state bits (default: init)");
  s->add_option("--goal", solve.goal, "Goal state bits (default: instance goal)");
  s->add_flag("--ecc", solve.ecc, "Report eccentricity instead of a plan");
  s->add_option("--emit-plan", solve.emit_plan, "Write the plan as JSON");
  s->add_option("--max-vars", solve.max_vars, "State-array cap")->check(CLI::Range(1, 32));

  OracleArgs oracle;
  auto* o = app.add_subcommand("oracle", "Maximum eccentricity over all instances of n variables");
  add_common(o, oracle.c, true);
  o->add_option("--n", oracle.n)->required()->check(CLI::Range(2, 8));
  o->add_option("--samples", oracle.samples, "Sample this many subsets (required for n > 3)");
  o->add_option("--seed", oracle.seed);
  o->add_option("--out", oracle.out, "Write the regression record here");

  BoundsArgs bounds;
  auto* b = app.add_subcommand("bounds", "Goodness, bidirectional edges, omitted states");
  add_common(b, bounds.c, true);
  b->add_option("--instance", bounds.instance)->required();
  b->add_option("--start", bounds.start);
  b->add_option("--goal", bounds.goal);
  b->add_flag("--require-good", bounds.require_good, "Fail when the instance is not good");

  AnalyzeArgs analyze;
  auto* an = app.add_subcommand("analyze", "Goal subplans, overlap tree and DOT export");
  an->add_option("--instance", analyze.instance)->required();
  an->add_option("--plan", analyze.plan, "Plan JSON")->required();
  an->add_option("--dot-graph", analyze.dot_graph);
  an->add_option("--dot-tree", analyze.dot_tree);
  auto* an_json = an->add_option("--json", analyze.json_path, "Write the report as JSON (stdout without a path)")
                      ->expected(0, 1);

  EncodeArgs enc;
  auto* e = app.add_subcommand("encode", "Write the CNF for (n, length)");
  add_common(e, enc.c, false);
  e->add_option("--n", enc.n)->required()->check(CLI::Range(2, 7));
  e->add_option("--len", enc.len)->required()->check(CLI::PositiveNumber);
  e->add_option("--out", enc.out);

  DecodeArgs dec;
  auto* d = app.add_subcommand("decode", "Decode and certify a solver model");
  add_common(d, dec.c, false);
  d->add_option("--cnf", dec.cnf)->required();
  d->add_option("--model", dec.model, "Solver output")->required();
  d->add_option("--emit", dec.emit, "instance, plan or instance+plan");
  d->add_option("--out-instance", dec.out_instance);
  d->add_option("--out-plan", dec.out_plan);

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "Solve increasing lengths until unsatisfiable");
  add_common(w, sw.c, false);
  w->add_option("--n", sw.n)->required()->check(CLI::Range(2, 7));
  w->add_option("--from", sw.from)->check(CLI::PositiveNumber);
  w->add_option("--to", sw.to);
  w->add_option("--solver", sw.solver, fmt::format("Solver command (default ${})", kSolverEnv));
  w->add_option("--workdir", sw.workdir, "Directory for CNF files");
  w->add_option("--out-instance", sw.out_instance);
  w->add_option("--out-plan", sw.out_plan);

  CompileArgs comp;
  auto* c = app.add_subcommand("compile", "Compile to a Petri net or a MAPF problem");
  add_common(c, comp.c, false);
  c->add_option("--target", comp.target)->required()->check(CLI::IsMember({"petri", "mapf"}));
  c->add_option("--instance", comp.instance)->required();
  c->add_option("--out", comp.out);

  PetriArgs petri;
  auto* pn = app.add_subcommand("petri", "Reachability and structural checks on a net");
  add_common(pn, petri.c, false);
  pn->add_option("--reach", petri.net, "Net JSON")->required();
  pn->add_option("--check", petri.check, "Comma list: safe,conservative");
  pn->add_option("--limit", petri.limit, "Marking cap");

  MapfArgs mapf;
  auto* mp = app.add_subcommand("mapf", "Solve or validate a cooperative MAPF problem");
  add_common(mp, mapf.c, false);
  mp->add_option("--solve", mapf.problem, "MAPF JSON")->required();
  mp->add_option("--horizon", mapf.horizon)->check(CLI::NonNegativeNumber);
  mp->add_option("--emit", mapf.emit, "Write the schedule as JSON");
  mp->add_option("--validate", mapf.validate, "Check a schedule (JSON or agent listing) instead");
  mp->add_option("--budget", mapf.budget, "Constraint nodes per makespan");

  ReproArgs repro;
  auto* r = app.add_subcommand("repro", "Regression runs against known values");
  add_common(r, repro.c, true);
  r->add_flag("--table1", repro.table1, "Eccentricities of P_n from n = 6");
  r->add_option("--max-n", repro.max_n)->check(CLI::Range(6, 26));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return do_gen(gen, out);
    if (*s) return do_solve(solve, out);
    if (*o) return do_oracle(oracle, out);
    if (*b) return do_bounds(bounds, out);
    if (*an) {
      analyze.json = an_json->count() > 0;
      return do_analyze(analyze, out);
    }
    if (*e) return do_encode(enc, out);
    if (*d) return do_decode(dec, out);
    if (*w) return do_sweep(sw, out);
    if (*c) return do_compile(comp, out, err);
    if (*pn) return do_petri(petri, out);
    if (*mp) return do_mapf(mapf, out);
    if (*r) return do_repro(repro, out);
  } catch (const ParseError& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  } catch (const CapExceeded& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  } catch (const Error& ex) {
    err << "failed: " << ex.what() << '\n';
    return kDomainFailure;
  } catch (const std::ios_base::failure& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  } catch (const nlohmann::json::exception& ex) {
    err << "error: bad JSON: " << ex.what() << '\n';
    return kUsage;
  } catch (const std::filesystem::filesystem_error& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace strips11::cli
