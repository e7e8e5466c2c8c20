#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <filesystem>

#include <fmt/format.h>

#include "strips11/format.hpp"
#include "strips11/generators.hpp"
#include "strips11/satgen.hpp"
#include "strips11/search.hpp"
#include "support.hpp"

using namespace strips11;

namespace {

const std::string kSolver = STRIPS11_TEST_SOLVER;

// Assignment spelling out (instance over `mask`, plan through `states`).
Model assignment(const CnfLayout& lay, std::uint64_t mask, const std::vector<State>& states) {
  const auto all = enumerate_all_actions(lay.n);
  Model m;
  m.values.assign(static_cast<std::size_t>(lay.num_vars) + 1, false);
  auto set = [&](int var) { m.values[static_cast<std::size_t>(var)] = true; };
  Instance p;
  p.n = lay.n;
  p.init = State::zeros(lay.n);
  for (const Action& a : all) {
    if ((mask >> a.id) & 1U) {
      set(lay.action_var(a.id));
      p.actions.push_back(Action{a.pre, a.eff, static_cast<int>(p.actions.size())});
    }
  }
  for (int t = 0; t <= lay.length; ++t) {
    for (int v = 0; v < lay.n; ++v) {
      if (states[static_cast<std::size_t>(t)].get(v)) set(lay.path_var(t, v));
    }
  }
  for (int t = 1; t <= lay.length; ++t) {
    const State& before = states[static_cast<std::size_t>(t) - 1];
    const State& after = states[static_cast<std::size_t>(t)];
    int flipped = -1;
    for (int v = 0; v < lay.n; ++v) {
      if (before.get(v) != after.get(v)) flipped = v;
    }
    REQUIRE(flipped >= 0);
    set(lay.flip_var(t, flipped));
    for (const Action& a : all) {
      if (((mask >> a.id) & 1U) && holds(before, a.pre) && apply(before, a.eff) == after) {
        set(lay.aux_var(t, a.id));
        break;
      }
    }
  }
  const DistanceMap dm = bfs_from(p, p.init);
  for (int t = 0; t < lay.length; ++t) {
    for (std::uint64_t u = 0; u < (std::uint64_t{1} << lay.n); ++u) {
      if (dm.distance(State(lay.n, u)) <= static_cast<std::uint32_t>(t)) set(lay.bfs_var(t, u));
    }
  }
  return m;
}

bool satisfies(const Model& m, const CnfArtifact& cnf) {
  for (const auto& clause : cnf.clauses) {
    bool sat = false;
    for (int lit : clause) sat = sat || m.value(std::abs(lit)) == (lit > 0);
    if (!sat) return false;
  }
  return true;
}

Instance from_mask(int n, std::uint64_t mask) {
  Instance p;
  p.n = n;
  p.init = State::zeros(n);
  for (const Action& a : enumerate_all_actions(n)) {
    if ((mask >> a.id) & 1U) p.actions.push_back(Action{a.pre, a.eff, static_cast<int>(p.actions.size())});
  }
  return p;
}

std::vector<State> shortest_states(const Instance& p, const State& goal) {
  const Plan plan = extract_shortest_plan(p, p.init, goal);
  Instance q = p;
  q.goal = goal;
  return validate_plan(q, plan).states;
}

}  // namespace

TEST_CASE("layout") {
  const CnfLayout lay = CnfLayout::make(5, 29);
  CHECK(lay.actions == 80);
  CHECK(lay.path_first - lay.action_first == 80);
  CHECK(lay.flip_first - lay.path_first == 150);
  CHECK(lay.bfs_first - lay.flip_first == 5 * 29);
  CHECK(lay.aux_first - lay.bfs_first == 32 * 29);
  CHECK(lay.num_vars == lay.aux_first + 80 * 29 - 1);
  CHECK(lay.action_var(0) == 1);
  CHECK(lay.path_var(0, 0) == 81);
  CHECK(lay.aux_var(29, 79) == lay.num_vars);
  CHECK_THROWS_AS(lay.path_var(30, 0), InvalidArgument);
  CHECK_THROWS_AS(lay.flip_var(0, 0), InvalidArgument);
  CHECK_THROWS_AS(lay.bfs_var(29, 0), InvalidArgument);
  CHECK_THROWS_AS(encode(1, 3), CapExceeded);
  CHECK_THROWS_AS(encode(8, 3), CapExceeded);
  CHECK_THROWS_AS(encode(3, 0), InvalidArgument);
}

TEST_CASE("encoding is deterministic and round-trips") {
  const CnfArtifact a = encode(3, 5);
  const CnfArtifact b = encode(3, 5);
  CHECK(a == b);
  const std::string text = write_dimacs(a);
  CHECK(text == write_dimacs(b));
  CHECK(parse_dimacs(text) == a);
  CHECK(text.find(fmt::format("p cnf {} {}\n", a.num_vars(), a.clauses.size())) != std::string::npos);
  for (const auto& clause : a.clauses) {
    CHECK_FALSE(clause.empty());
    for (int lit : clause) {
      CHECK(lit != 0);
      CHECK(std::abs(lit) <= a.num_vars());
    }
  }
  CnfArtifact empty;
  empty.layout = CnfLayout::make(2, 1);
  const std::string e = write_dimacs(empty);
  CHECK(e.find(fmt::format("p cnf {} 0\n", empty.num_vars())) != std::string::npos);
  CHECK(parse_dimacs(e) == empty);
}

TEST_CASE("DIMACS parse errors") {
  const std::string good = write_dimacs(encode(2, 1));
  CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 2 0\n"), ParseError);  // no header comment
  std::string unterminated = good.substr(0, good.size() - 2);
  CHECK_THROWS_AS(parse_dimacs(unterminated), ParseError);
  std::string too_big = good + "99999 0\n";
  CHECK_THROWS_AS(parse_dimacs(too_big), ParseError);
  std::string wrong_count = good + "1 0\n";
  CHECK_THROWS_AS(parse_dimacs(wrong_count), ParseError);
}

TEST_CASE("solver output parsing") {
  const auto sat = parse_solver_output("c hello\ns SATISFIABLE\nv 1 -2 3\nv -4 0\n", 4);
  CHECK(sat.status == SolveStatus::kSat);
  REQUIRE(sat.model);
  CHECK(sat.model->value(1));
  CHECK_FALSE(sat.model->value(2));
  CHECK(sat.model->value(3));
  CHECK_FALSE(sat.model->value(4));
  CHECK(parse_solver_output("s UNSATISFIABLE\n", 4).status == SolveStatus::kUnsat);
  CHECK_FALSE(parse_solver_output("s UNSATISFIABLE\n", 4).model);
  CHECK(parse_solver_output("s UNKNOWN\n", 4).status == SolveStatus::kUnknown);
  CHECK(parse_solver_output("", 4).status == SolveStatus::kUnknown);
  const auto bare = parse_solver_output("SAT\n-1 2 0\n", 2);
  CHECK(bare.status == SolveStatus::kSat);
  REQUIRE(bare.model);
  CHECK(bare.model->value(2));
  CHECK(parse_solver_output("UNSAT\n", 2).status == SolveStatus::kUnsat);
}

TEST_CASE("every certificate yields a satisfying assignment") {
  // All instances at n = 2 and every reachable target at its exact distance.
  for (std::uint64_t mask = 0; mask < 256; ++mask) {
    const Instance p = from_mask(2, mask);
    const DistanceMap dm = bfs_from(p, p.init);
    for (std::uint64_t u = 1; u < 4; ++u) {
      const State goal(2, u);
      if (!dm.reached(goal)) continue;
      const int len = static_cast<int>(dm.distance(goal));
      const CnfArtifact cnf = encode(2, len);
      const Model m = assignment(cnf.layout, mask, shortest_states(p, goal));
      CAPTURE(mask);
      CAPTURE(u);
      REQUIRE(satisfies(m, cnf));
      const Decoded d = decode(m, cnf);
      CHECK(d.instance.actions.size() == p.actions.size());
      CHECK(*d.instance.goal == goal);
      CHECK(verify_certificate(d.instance, d.plan, static_cast<std::uint64_t>(len)));
    }
  }
  // The four-variable example and random n = 3..5 instances.
  const Instance p4 = gen_P(4);
  std::uint64_t mask4 = 0;
  for (const Action& a : p4.actions) mask4 |= std::uint64_t{1} << canonical_index(a, 4);
  const CnfArtifact c4 = encode(4, 15);
  const Model m4 = assignment(c4.layout, mask4, shortest_states(p4, State::from_string("1011")));
  CHECK(satisfies(m4, c4));
  CHECK(decode(m4, c4).plan.length() == 15);

  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const int n = 3 + static_cast<int>(seed % 3);
    const Instance p = random_instance(n, seed, false);
    std::uint64_t mask = 0;
    for (const Action& a : p.actions) mask |= std::uint64_t{1} << canonical_index(a, n);
    const Instance q = from_mask(n, mask);
    const Eccentricity e = eccentricity(q, q.init);
    if (e.value == 0) continue;
    const CnfArtifact cnf = encode(n, static_cast<int>(e.value));
    const Model m = assignment(cnf.layout, mask, shortest_states(q, e.farthest.back()));
    CHECK(satisfies(m, cnf));
  }
}

TEST_CASE("a path with a shortcut violates the encoding") {
  // 00 -> 10 -> 11 -> 01, but 01 is one step from 00.
  using L = Literal;
  const auto all = enumerate_all_actions(2);
  auto idx = [&](Literal pre, Literal eff) { return canonical_index(Action{pre, eff, 0}, 2); };
  const std::uint64_t mask = (std::uint64_t{1} << idx(L::neg(1), L::pos(0))) |
                             (std::uint64_t{1} << idx(L::pos(0), L::pos(1))) |
                             (std::uint64_t{1} << idx(L::pos(1), L::neg(0))) |
                             (std::uint64_t{1} << idx(L::neg(0), L::pos(1)));
  const std::vector<State> walk{State::from_string("00"), State::from_string("10"), State::from_string("11"),
                                State::from_string("01")};
  const CnfArtifact cnf = encode(2, 3);
  const Model m = assignment(cnf.layout, mask, walk);
  CHECK_FALSE(satisfies(m, cnf));
  CHECK_THROWS_AS(decode(m, cnf), ModelInconsistent);
  (void)all;
}

TEST_CASE("certificate verification") {
  const Instance p = fixtures::p6_with_goal();
  const Plan plan = fixtures::plan_through(p, fixtures::p6_chain_states());
  CHECK(verify_certificate(p, plan, 30));
  CHECK_FALSE(verify_certificate(p, plan, 29));
  // A detour to 100000: distance 1 but plan length 3.
  Instance q = gen_P(6);
  q.goal = State::from_string("100000");
  CHECK_FALSE(verify_certificate(q, Plan{{5, 0, 6}}, 3));
  CHECK(verify_certificate(q, Plan{{5}}, 1));
  Instance shifted = q;
  shifted.init = State::from_string("000001");
  CHECK_FALSE(verify_certificate(shifted, Plan{{5}}, 1));
  CHECK_FALSE(verify_certificate(q, Plan{{0}}, 1));
}

TEST_CASE("external solver agrees with exhaustive enumeration at n = 2") {
  REQUIRE_MESSAGE(!kSolver.empty(), "no SAT solver configured");
  // Largest L with some instance reaching a state at distance exactly L.
  std::uint32_t best = 0;
  for (std::uint64_t mask = 0; mask < 256; ++mask) {
    best = std::max(best, eccentricity(from_mask(2, mask), State::zeros(2)).value);
  }
  CHECK(best == 3);
  const auto dir = std::filesystem::temp_directory_path() / "strips11-test-satgen";
  std::filesystem::create_directories(dir);
  for (int len = 1; len <= static_cast<int>(best) + 2; ++len) {
    CAPTURE(len);
    const CnfArtifact cnf = encode(2, len);
    const std::string path = (dir / fmt::format("n2_{}.cnf", len)).string();
    save_text(path, write_dimacs(cnf));
    const SolverOutput out = run_solver(kSolver, path, cnf.num_vars());
    CHECK(out.status == (len <= static_cast<int>(best) ? SolveStatus::kSat : SolveStatus::kUnsat));
    if (out.status == SolveStatus::kSat) {
      REQUIRE(out.model);
      const Decoded d = decode(*out.model, cnf);
      CHECK(verify_certificate(d.instance, d.plan, static_cast<std::uint64_t>(len)));
    }
  }
  const SweepResult r = sweep(2, 1, std::nullopt, kSolver, dir.string());
  REQUIRE(r.best);
  CHECK(*r.best == 3);
  CHECK(r.steps.size() == 4);
  CHECK(r.steps.back().status == SolveStatus::kUnsat);
  REQUIRE(r.certificate);
  CHECK(verify_certificate(r.certificate->instance, r.certificate->plan, 3));
  const SweepResult capped = sweep(2, 2, 2, kSolver, dir.string());
  CHECK(capped.steps.size() == 1);
  CHECK(capped.best == 2);
}

TEST_CASE("external solver at n = 3 matches the oracle maximum") {
  REQUIRE_MESSAGE(!kSolver.empty(), "no SAT solver configured");
  const auto dir = std::filesystem::temp_directory_path() / "strips11-test-satgen";
  const SweepResult r = sweep(3, 6, std::nullopt, kSolver, dir.string());
  REQUIRE(r.best);
  CHECK(*r.best == 7);
  CHECK(r.steps.back().status == SolveStatus::kUnsat);
}
