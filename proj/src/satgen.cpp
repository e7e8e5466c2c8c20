#include "strips11/satgen.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <sstream>

#include <fmt/core.h>

#include "strips11/format.hpp"
#include "strips11/search.hpp"

namespace strips11 {

namespace {

constexpr std::string_view kMagic = "c strips11-cnf";

void check_range(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(std::string("cnf variable index out of range: ") + what);
}

// Literal that is true iff path(t, v) has value `value`.
int path_is(const CnfLayout& lay, int t, int v, bool value) {
  const int var = lay.path_var(t, v);
  return value ? var : -var;
}

}  // namespace

CnfLayout CnfLayout::make(int n, int length) {
  CnfLayout lay;
  lay.n = n;
  lay.length = length;
  lay.actions = 4 * n * n - 4 * n;
  lay.action_first = 1;
  lay.path_first = lay.action_first + lay.actions;
  lay.flip_first = lay.path_first + n * (length + 1);
  lay.bfs_first = lay.flip_first + n * length;
  lay.aux_first = lay.bfs_first + (1 << n) * length;
  lay.num_vars = lay.aux_first + lay.actions * length - 1;
  return lay;
}

int CnfLayout::action_var(int a) const {
  check_range(a >= 0 && a < actions, "action");
  return action_first + a;
}

int CnfLayout::path_var(int t, int v) const {
  check_range(t >= 0 && t <= length && v >= 0 && v < n, "path");
  return path_first + t * n + v;
}

int CnfLayout::flip_var(int t, int v) const {
  check_range(t >= 1 && t <= length && v >= 0 && v < n, "flip");
  return flip_first + (t - 1) * n + v;
}

int CnfLayout::bfs_var(int t, std::uint64_t u) const {
  check_range(t >= 0 && t < length && u < (std::uint64_t{1} << n), "bfs");
  return bfs_first + t * (1 << n) + static_cast<int>(u);
}

int CnfLayout::aux_var(int t, int a) const {
  check_range(t >= 1 && t <= length && a >= 0 && a < actions, "aux");
  return aux_first + (t - 1) * actions + a;
}

CnfArtifact encode(int n, int length) {
  if (n < 2 || n > 7) throw CapExceeded("encode supports 2 <= n <= 7");
  if (length < 1) throw InvalidArgument("encode requires a length of at least 1");
  if (length > 4096) throw CapExceeded("encode supports lengths up to 4096");

  CnfArtifact cnf;
  cnf.layout = CnfLayout::make(n, length);
  const CnfLayout& lay = cnf.layout;
  auto& out = cnf.clauses;
  const auto all = enumerate_all_actions(n);
  const std::uint64_t states = std::uint64_t{1} << n;

  // Path starts at the origin.
  for (int v = 0; v < n; ++v) out.push_back({-lay.path_var(0, v)});

  for (int t = 1; t <= length; ++t) {
    // Exactly one variable flips per step.
    std::vector<int> some;
    for (int v = 0; v < n; ++v) some.push_back(lay.flip_var(t, v));
    out.push_back(some);
    for (int v = 0; v < n; ++v) {
      for (int w = v + 1; w < n; ++w) out.push_back({-lay.flip_var(t, v), -lay.flip_var(t, w)});
    }
    // Frame: a flipped variable changes, every other variable keeps its value.
    for (int v = 0; v < n; ++v) {
      const int f = lay.flip_var(t, v);
      const int now = lay.path_var(t, v);
      const int before = lay.path_var(t - 1, v);
      out.push_back({-f, now, before});
      out.push_back({-f, -now, -before});
      out.push_back({f, -now, before});
      out.push_back({f, now, -before});
    }
    // Justification: the new value is the effect of a present action whose
    // precondition held before the step.
    for (int v = 0; v < n; ++v) {
      for (bool value : {true, false}) {
        std::vector<int> clause{-lay.flip_var(t, v), path_is(lay, t, v, !value)};
        for (const Action& a : all) {
          if (a.eff == Literal{v, value}) clause.push_back(lay.aux_var(t, a.id));
        }
        out.push_back(clause);
      }
    }
    for (const Action& a : all) {
      const int aux = lay.aux_var(t, a.id);
      out.push_back({-aux, lay.action_var(a.id)});
      out.push_back({-aux, path_is(lay, t - 1, a.pre.var, a.pre.positive)});
      out.push_back({-aux, lay.flip_var(t, a.eff.var)});
      out.push_back({-aux, path_is(lay, t, a.eff.var, a.eff.positive)});
    }
  }

  // BFS layers: bfs(0, .) is exactly the origin; layers grow monotonically
  // and along every edge of a present action.
  for (std::uint64_t u = 0; u < states; ++u) {
    out.push_back({u == 0 ? lay.bfs_var(0, u) : -lay.bfs_var(0, u)});
  }
  for (int t = 1; t < length; ++t) {
    for (std::uint64_t u = 0; u < states; ++u) {
      out.push_back({-lay.bfs_var(t - 1, u), lay.bfs_var(t, u)});
    }
    for (std::uint64_t u = 0; u < states; ++u) {
      const State s(n, u);
      for (const Action& a : all) {
        if (!holds(s, a.pre) || holds(s, a.eff)) continue;
        const std::uint64_t w = u ^ (std::uint64_t{1} << a.eff.var);
        out.push_back({-lay.bfs_var(t - 1, u), -lay.action_var(a.id), lay.bfs_var(t, w)});
      }
    }
  }

  // Shortest-path link: the state after t steps is not reachable within t-1.
  for (int t = 1; t <= length; ++t) {
    for (std::uint64_t u = 0; u < states; ++u) {
      std::vector<int> clause{-lay.bfs_var(t - 1, u)};
      for (int v = 0; v < n; ++v) clause.push_back(path_is(lay, t, v, ((u >> v) & 1U) == 0));
      out.push_back(clause);
    }
  }
  return cnf;
}

std::string write_dimacs(const CnfArtifact& cnf) {
  const CnfLayout& lay = cnf.layout;
  std::string out;
  out += fmt::format("{} n {} len {}\n", kMagic, lay.n, lay.length);
  out += fmt::format(
      "c group action first {} count {} index a (effect var, effect sign +/-, precondition "
      "var, precondition sign +/-)\n",
      lay.action_first, lay.actions);
  out += fmt::format("c group path first {} count {} index t*n+v for t in [0,len]\n",
                     lay.path_first, lay.n * (lay.length + 1));
  out += fmt::format("c group flip first {} count {} index (t-1)*n+v for t in [1,len]\n",
                     lay.flip_first, lay.n * lay.length);
  out += fmt::format("c group bfs first {} count {} index t*2^n+u for t in [0,len-1]\n",
                     lay.bfs_first, (1 << lay.n) * lay.length);
  out += fmt::format("c group aux first {} count {} index (t-1)*actions+a for t in [1,len]\n",
                     lay.aux_first, lay.actions * lay.length);
  out += fmt::format("c states are bit vectors, bit v = variable v\n");
  out += fmt::format("p cnf {} {}\n", lay.num_vars, cnf.clauses.size());
  for (const auto& clause : cnf.clauses) {
    for (int lit : clause) {
      out += std::to_string(lit);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

CnfArtifact parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<CnfLayout> layout;
  long declared_vars = -1;
  long declared_clauses = -1;
  CnfArtifact cnf;
  std::vector<int> current;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind(kMagic, 0) == 0) {
      int n = 0;
      int len = 0;
      if (std::sscanf(line.c_str() + kMagic.size(), " n %d len %d", &n, &len) != 2) {
        throw ParseError(line_no, 1, "malformed strips11-cnf header");
      }
      layout = CnfLayout::make(n, len);
      continue;
    }
    if (line.empty() || line[0] == 'c') continue;
    if (line[0] == 'p') {
      if (std::sscanf(line.c_str(), "p cnf %ld %ld", &declared_vars, &declared_clauses) != 2) {
        throw ParseError(line_no, 1, "malformed problem line");
      }
      continue;
    }
    std::istringstream ls(line);
    long lit = 0;
    while (ls >> lit) {
      if (lit == 0) {
        cnf.clauses.push_back(std::move(current));
        current.clear();
      } else {
        if (declared_vars < 0) throw ParseError(line_no, 1, "clause before problem line");
        if (lit > declared_vars || -lit > declared_vars) {
          throw ParseError(line_no, 1, fmt::format("literal {} exceeds {} variables", lit, declared_vars));
        }
        current.push_back(static_cast<int>(lit));
      }
    }
    if (!ls.eof()) throw ParseError(line_no, 1, "unexpected token in clause");
  }
  if (!current.empty()) throw ParseError(line_no, 1, "last clause is not 0-terminated");
  if (!layout) throw ParseError(line_no, 1, "missing strips11-cnf header comment");
  if (declared_vars != layout->num_vars) throw ParseError(line_no, 1, "variable count disagrees with layout");
  if (declared_clauses != static_cast<long>(cnf.clauses.size())) {
    throw ParseError(line_no, 1, "clause count disagrees with problem line");
  }
  cnf.layout = *layout;
  return cnf;
}

SolverOutput parse_solver_output(std::string_view text, int num_vars) {
  SolverOutput result;
  Model model;
  model.values.assign(static_cast<std::size_t>(num_vars) + 1, false);
  bool saw_values = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c') continue;
    if (line.rfind("s ", 0) == 0 || line == "SAT" || line == "UNSAT" ||
        line == "SATISFIABLE" || line == "UNSATISFIABLE" || line == "INDETERMINATE") {
      if (line.find("UNSAT") != std::string::npos) {
        result.status = SolveStatus::kUnsat;
      } else if (line.find("SAT") != std::string::npos) {
        result.status = SolveStatus::kSat;
      }
      continue;
    }
    std::istringstream ls(line[0] == 'v' ? line.substr(1) : line);
    long lit = 0;
    while (ls >> lit) {
      if (lit == 0) continue;
      const long var = lit < 0 ? -lit : lit;
      if (var <= num_vars) model.values[static_cast<std::size_t>(var)] = lit > 0;
      saw_values = true;
    }
  }
  if (result.status == SolveStatus::kSat && saw_values) result.model = std::move(model);
  return result;
}

Decoded decode(const Model& model, const CnfArtifact& cnf) {
  const CnfLayout& lay = cnf.layout;
  if (model.values.size() < static_cast<std::size_t>(lay.num_vars) + 1) {
    throw ModelInconsistent("model has fewer variables than the CNF");
  }
  for (std::size_t c = 0; c < cnf.clauses.size(); ++c) {
    bool sat = false;
    for (int lit : cnf.clauses[c]) {
      if (model.value(lit > 0 ? lit : -lit) == (lit > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) throw ModelInconsistent(fmt::format("clause {} is falsified by the model", c));
  }

  const auto all = enumerate_all_actions(lay.n);
  Decoded out;
  std::vector<std::pair<Literal, Literal>> chosen;
  std::vector<int> local_id(all.size(), -1);
  for (const Action& a : all) {
    if (model.value(lay.action_var(a.id))) {
      local_id[static_cast<std::size_t>(a.id)] = static_cast<int>(chosen.size());
      chosen.emplace_back(a.pre, a.eff);
    }
  }
  auto path_state = [&](int t) {
    std::uint64_t bits = 0;
    for (int v = 0; v < lay.n; ++v) {
      if (model.value(lay.path_var(t, v))) bits |= std::uint64_t{1} << v;
    }
    return State(lay.n, bits);
  };
  out.instance = make_instance(lay.n, chosen, State::zeros(lay.n), path_state(lay.length));

  for (int t = 1; t <= lay.length; ++t) {
    const State before = path_state(t - 1);
    const State after = path_state(t);
    int step = -1;
    for (const Action& a : all) {
      if (!model.value(lay.aux_var(t, a.id))) continue;
      if (local_id[static_cast<std::size_t>(a.id)] < 0 || !holds(before, a.pre) ||
          apply(before, a.eff) != after || before == after) {
        throw ModelInconsistent(fmt::format("step {} justification {} disagrees with the path", t,
                                            a.to_string()));
      }
      step = local_id[static_cast<std::size_t>(a.id)];
      break;
    }
    if (step < 0) throw ModelInconsistent(fmt::format("step {} has no justifying action", t));
    out.plan.steps.push_back(step);
  }
  validate_plan(out.instance, out.plan);
  return out;
}

bool verify_certificate(const Instance& p, const Plan& plan, std::uint64_t length) {
  if (plan.length() != length) return false;
  if (p.init != State::zeros(p.n)) return false;
  Trace trace;
  try {
    trace = validate_plan(p, plan);
  } catch (const Error&) {
    return false;
  }
  SearchOptions opts;
  opts.record_parents = false;
  const DistanceMap dm = bfs_from(p, State::zeros(p.n), opts);
  return dm.distance(trace.final_state()) == length;
}

SolverOutput run_solver(const std::string& command, const std::string& cnf_path, int num_vars) {
  const std::string cmd = command + " '" + cnf_path + "'";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) throw Error("cannot start solver: " + command);
  std::string text;
  std::array<char, 1 << 14> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) text.append(buf.data(), got);
  pipe.reset();
  return parse_solver_output(text, num_vars);
}

SweepResult sweep(int n, int from, std::optional<int> to, const std::string& command,
                  const std::string& workdir) {
  SweepResult result;
  std::filesystem::create_directories(workdir);
  for (int len = from; !to || len <= *to; ++len) {
    const CnfArtifact cnf = encode(n, len);
    const std::string path = (std::filesystem::path(workdir) / fmt::format("n{}_len{}.cnf", n, len)).string();
    save_text(path, write_dimacs(cnf));
    const auto start = std::chrono::steady_clock::now();
    const SolverOutput solved = run_solver(command, path, cnf.num_vars());
    SweepStep step;
    step.length = len;
    step.status = solved.status;
    step.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (solved.status == SolveStatus::kSat) {
      if (!solved.model) throw ModelInconsistent("solver reported SAT without a model");
      Decoded d = decode(*solved.model, cnf);
      step.certified = verify_certificate(d.instance, d.plan, static_cast<std::uint64_t>(len));
      if (!step.certified) {
        throw ModelInconsistent(fmt::format("decoded plan for length {} fails certification", len));
      }
      result.best = len;
      result.certificate = std::move(d);
    }
    result.steps.push_back(step);
    if (solved.status != SolveStatus::kSat) break;
  }
  return result;
}

}  // namespace strips11
