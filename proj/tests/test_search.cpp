#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <map>

#include "strips11/bounds.hpp"
#include "strips11/generators.hpp"
#include "strips11/search.hpp"
#include "support.hpp"

using namespace strips11;

namespace {

// Queue BFS over explicit successor lists.
std::vector<std::uint32_t> reference_bfs(const Instance& p, std::uint64_t start) {
  std::vector<std::uint32_t> dist(std::size_t{1} << p.n, DistanceMap::kUnreached);
  std::deque<std::uint64_t> q{start};
  dist[start] = 0;
  while (!q.empty()) {
    const auto s = q.front();
    q.pop_front();
    for (auto t : fixtures::successors(p, s)) {
      if (dist[t] == DistanceMap::kUnreached) {
        dist[t] = dist[s] + 1;
        q.push_back(t);
      }
    }
  }
  return dist;
}

}  // namespace

TEST_CASE("induced edge counts") {
  CHECK(induced_edge_count(Action{Literal::pos(0), Literal::pos(1), 0}, 2) == 1);
  CHECK(induced_edge_count(gen_P(6).actions[0], 6) == 16);
  for (int n : {4, 5, 6}) {
    for (const Action& a : enumerate_all_actions(n)) {
      CHECK(induced_edge_count(a, n) == (std::uint64_t{1} << (n - 2)));
    }
  }
  CHECK_THROWS_AS(induced_edge_count(Action{Literal::pos(0), Literal::pos(5), 0}, 4), InvalidArgument);
}

TEST_CASE("every directed hypercube edge is induced by n-1 canonical actions") {
  for (int n = 2; n <= 5; ++n) {
    std::map<std::pair<std::uint64_t, std::uint64_t>, int> cover;
    std::uint64_t total = 0;
    for (const Action& a : enumerate_all_actions(n)) {
      total += induced_edge_count(a, n);
      for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
        const State st(n, s);
        if (holds(st, a.pre) && !holds(st, a.eff)) ++cover[{s, apply(st, a.eff).bits()}];
      }
    }
    CHECK(cover.size() == static_cast<std::size_t>(n) << n);
    for (const auto& [edge, count] : cover) CHECK(count == n - 1);
    CHECK(total == static_cast<std::uint64_t>(4 * n * n - 4 * n) << (n - 2));
  }
}

TEST_CASE("bfs on P_6") {
  const Instance p = gen_P(6);
  const DistanceMap dm = bfs_from(p, State::zeros(6));
  CHECK(dm.distance(State::zeros(6)) == 0);
  CHECK(dm.distance(State::from_string("100000")) == 1);
  CHECK(dm.distance(State::from_string("111111")) == 6);
  CHECK(dm.distance(State::from_string("101101")) == 30);
  CHECK_FALSE(dm.parent_action(State::zeros(6)));
  CHECK(dm.parent_action(State::from_string("100000")) == 5);
  CHECK(dm.parent_state(State::from_string("100000")) == State::zeros(6));
  CHECK_THROWS_AS(dm.distance(State::zeros(5)), InvalidArgument);
}

TEST_CASE("bfs without actions") {
  const Instance p = make_instance(4, {}, State::from_string("0110"));
  const DistanceMap dm = bfs_from(p, p.init);
  CHECK(dm.reached_count() == 1);
  CHECK(dm.distance(p.init) == 0);
  CHECK_FALSE(dm.reached(State::zeros(4)));
  const Eccentricity e = eccentricity(p, p.init);
  CHECK(e.value == 0);
  CHECK(e.farthest == std::vector<State>{p.init});
}

TEST_CASE("bfs cap") {
  SearchOptions small;
  small.max_vars = 8;
  CHECK_THROWS_AS(bfs_from(gen_P(9), State::zeros(9), small), CapExceeded);
  SearchOptions huge;
  huge.max_vars = 40;
  CHECK_THROWS_AS(bfs_from(gen_P(33), State::zeros(33), huge), CapExceeded);
  CHECK_THROWS_AS(bfs_from(gen_P(6), State::zeros(5)), InvalidArgument);
}

TEST_CASE("eccentricity of P_n") {
  SearchOptions opts;
  opts.record_parents = false;
  for (int n = 6; n <= 12; ++n) {
    CAPTURE(n);
    const Eccentricity e = eccentricity(gen_P(n), State::zeros(n), opts);
    CHECK(e.value == *known_length_P(n));
    CHECK(std::ranges::is_sorted(e.farthest));
    CHECK(std::ranges::binary_search(e.farthest, predicted_far_state(n)));
  }
  const Eccentricity e6 = eccentricity(gen_P(6), State::zeros(6));
  CHECK(e6.farthest == std::vector<State>{State::from_string("101101")});
  // Smaller members, from an independent brute force.
  CHECK(eccentricity(gen_P(4), State::zeros(4)).value == 15);
  CHECK(eccentricity(gen_P(4), State::zeros(4)).farthest == std::vector<State>{State::from_string("1011")});
  CHECK(eccentricity(gen_P(5), State::zeros(5)).value == 19);
}

TEST_CASE("bfs agrees with a queue BFS and respects the parent contract") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int n = 2 + static_cast<int>(seed % 9);
    const Instance p = random_instance(n, seed, seed % 2 == 0);
    Rng rng(seed * 31 + 1);
    const State start(n, rng.below(std::uint64_t{1} << n));
    const DistanceMap dm = bfs_from(p, start);
    const auto ref = reference_bfs(p, start.bits());
    REQUIRE(std::vector<std::uint32_t>(dm.distances().begin(), dm.distances().end()) == ref);
    for (std::uint64_t s = 0; s < ref.size(); ++s) {
      const State st(n, s);
      if (ref[s] == DistanceMap::kUnreached || s == start.bits()) continue;
      const auto a = dm.parent_action(st);
      const auto u = dm.parent_state(st);
      REQUIRE(a);
      REQUIRE(u);
      CHECK(ref[u->bits()] + 1 == ref[s]);
      CHECK(step(*u, p.actions[static_cast<std::size_t>(*a)]) == st);
      // Lowest action id among shortest incoming edges.
      for (const Action& b : p.actions) {
        if (b.id >= *a) break;
        const State pred = apply(st, negate(b.eff));
        if (holds(st, b.eff) && pred != st && holds(pred, b.pre)) {
          CHECK(ref[pred.bits()] + 1 != ref[s]);
        }
      }
    }
    // Triangle property over every induced edge.
    for (std::uint64_t s = 0; s < ref.size(); ++s) {
      if (ref[s] == DistanceMap::kUnreached) continue;
      for (auto t : fixtures::successors(p, s)) CHECK(ref[t] <= ref[s] + 1);
    }
  }
}

TEST_CASE("threaded bfs is identical") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int n = 10 + static_cast<int>(seed % 5);
    const Instance p = random_instance(n, seed, true);
    SearchOptions one;
    SearchOptions many;
    many.threads = 4;
    const DistanceMap a = bfs_from(p, p.init, one);
    const DistanceMap b = bfs_from(p, p.init, many);
    CHECK(std::ranges::equal(a.distances(), b.distances()));
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); s += 7) {
      CHECK(a.parent_action(State(n, s)) == b.parent_action(State(n, s)));
    }
  }
}

TEST_CASE("shortest plan extraction") {
  const Instance p = gen_P(6);
  const Plan to_far = extract_shortest_plan(p, State::zeros(6), State::from_string("101101"));
  CHECK(to_far.length() == 30);
  Instance q = p;
  q.goal = State::from_string("101101");
  CHECK(validate_plan(q, to_far).final_state() == *q.goal);
  CHECK(extract_shortest_plan(p, State::zeros(6), State::zeros(6)).steps.empty());
  CHECK(extract_shortest_plan(p, State::zeros(6), State::from_string("100000")).steps == std::vector<int>{5});

  const Instance none = make_instance(3, {}, State::zeros(3));
  CHECK_THROWS_AS(extract_shortest_plan(none, State::zeros(3), State::from_string("100")), Unreachable);

  SearchOptions no_parents;
  no_parents.record_parents = false;
  const DistanceMap dm = bfs_from(p, p.init, no_parents);
  CHECK_THROWS_AS(extract_shortest_plan(dm, State::from_string("100000")), Error);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Instance r = random_instance(7, seed, false);
    const DistanceMap d = bfs_from(r, r.init);
    for (std::uint64_t s = 0; s < 128; ++s) {
      const State goal(7, s);
      if (!d.reached(goal)) continue;
      const Plan plan = extract_shortest_plan(d, goal);
      CHECK(plan.length() == d.distance(goal));
      Instance with_goal = r;
      with_goal.goal = goal;
      CHECK_NOTHROW(validate_plan(with_goal, plan));
    }
  }
}

TEST_CASE("adding an action never shrinks the reached set") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int n = 3 + static_cast<int>(seed % 5);
    Instance p = random_instance(n, seed, false);
    const auto before = bfs_from(p, p.init);
    const auto all = enumerate_all_actions(n);
    Action extra = all[seed % all.size()];
    extra.id = static_cast<int>(p.actions.size());
    p.actions.push_back(extra);
    const auto after = bfs_from(p, p.init);
    CHECK(after.reached_count() >= before.reached_count());
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
      if (before.reached(State(n, s))) CHECK(after.reached(State(n, s)));
    }
  }
}

TEST_CASE("exhaustive oracle, n = 2") {
  const ExhaustiveResult r = exhaustive_max(2);
  CHECK(r.exhaustive);
  CHECK(r.value == 3);
  CHECK(r.subsets_evaluated == 256);
  CHECK(r.witness_mask == 22);
  CHECK(r.histogram == std::vector<std::uint64_t>{64, 80, 80, 32});
  CHECK(eccentricity(r.witness, State::zeros(2)).value == 3);
  REQUIRE(r.witness.actions.size() == 3);
  using L = Literal;
  CHECK(r.witness.actions[0].pre == L::neg(1));
  CHECK(r.witness.actions[0].eff == L::pos(0));
  CHECK(r.witness.actions[1].pre == L::pos(1));
  CHECK(r.witness.actions[1].eff == L::neg(0));
  CHECK(r.witness.actions[2].pre == L::pos(0));
  CHECK(r.witness.actions[2].eff == L::pos(1));
}

TEST_CASE("exhaustive oracle, n = 3") {
  ExhaustiveOptions opts;
  const ExhaustiveResult r = exhaustive_max(3, opts);
  CHECK(r.value == 7);
  CHECK(r.witness_mask == 1122837);
  CHECK(r.subsets_evaluated == (std::uint64_t{1} << 24));
  CHECK(r.histogram == std::vector<std::uint64_t>{262144, 638976, 2102016, 9315072, 3502848, 874752, 71040,
                                                  10368});
  CHECK(eccentricity(r.witness, State::zeros(3)).value == 7);
  opts.threads = 3;
  const ExhaustiveResult t = exhaustive_max(3, opts);
  CHECK(t.witness_mask == r.witness_mask);
  CHECK(t.histogram == r.histogram);
}

TEST_CASE("exhaustive oracle, sampling mode") {
  CHECK_THROWS_AS(exhaustive_max(4), InvalidArgument);
  ExhaustiveOptions opts;
  opts.samples = 2000;
  opts.seed = 3;
  const ExhaustiveResult a = exhaustive_max(4, opts);
  const ExhaustiveResult b = exhaustive_max(4, opts);
  CHECK_FALSE(a.exhaustive);
  CHECK(a.subsets_evaluated == 2000);
  CHECK(a.witness_mask == b.witness_mask);
  CHECK(a.value == eccentricity(a.witness, State::zeros(4)).value);
  CHECK(a.value < 16);
  opts.samples = 10;
  opts.budget = 5;
  CHECK_THROWS_AS(exhaustive_max(4, opts), BudgetExceeded);
}

TEST_CASE("random instances") {
  CHECK(random_instance(5, 42, false) == random_instance(5, 42, false));
  CHECK(is_good(random_instance(5, 42, true)));
  CHECK(is_good(random_instance(2, 0, true)));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n = 2 + static_cast<int>(seed % 15);
    const Instance p = random_instance(n, seed, true);
    CHECK(is_good(p));
    CHECK(p.canonical());
    CHECK(p.init == State::zeros(n));
    CHECK_NOTHROW(p.check());
  }
  Rng a(9);
  Rng b(9);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  // splitmix64 reference output for seed 0.
  Rng z(0);
  CHECK(z.next() == 0xe220a8397b1dcdafULL);
  CHECK_THROWS_AS(z.below(0), InvalidArgument);
}
