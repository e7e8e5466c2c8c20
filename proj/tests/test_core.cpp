#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "strips11/core.hpp"
#include "strips11/format.hpp"
#include "strips11/search.hpp"
#include "support.hpp"

using namespace strips11;

TEST_CASE("literal numbering") {
  CHECK(Literal::pos(0).to_signed() == 1);
  CHECK(Literal::neg(2).to_signed() == -3);
  CHECK(Literal::from_signed(-3) == Literal::neg(2));
  CHECK_THROWS_AS(Literal::from_signed(0), InvalidArgument);
  CHECK(Literal::pos(3).to_string() == "+v3");
  CHECK(Literal::neg(1).to_string() == "-v1");
  for (int n : {1, 4, 9}) {
    for (int node = 0; node < 2 * n; ++node) CHECK(Literal::from_node(node, n).node(n) == node);
  }
  CHECK(Literal::neg(2).node(4) == 2);
  CHECK(Literal::pos(2).node(4) == 6);
  CHECK(negate(Literal::pos(5)) == Literal::neg(5));
}

TEST_CASE("state strings put variable 0 first") {
  const State s = State::from_string("101101");
  CHECK(s.width() == 6);
  CHECK(s.get(0));
  CHECK_FALSE(s.get(1));
  CHECK(s.get(3));
  CHECK(holds(s, Literal::pos(3)));
  CHECK(holds(s, Literal::neg(4)));
  CHECK(s.to_string() == "101101");
  CHECK(State::zeros(3).to_string() == "000");
  CHECK(State::from_string("").width() == 0);
  CHECK_THROWS_AS(State::from_string("10x"), InvalidArgument);
  CHECK_THROWS_AS(State(3, 8), InvalidArgument);
  CHECK_THROWS_AS(State(65, 0), InvalidArgument);
  CHECK(State(64, ~std::uint64_t{0}).to_string() == std::string(64, '1'));
}

TEST_CASE("apply overwrites one variable") {
  const State s = State::from_string("0000");
  CHECK(apply(s, Literal::pos(0)).to_string() == "1000");
  CHECK(apply(apply(s, Literal::pos(0)), Literal::pos(0)).to_string() == "1000");
  CHECK(apply(State::from_string("1111"), Literal::neg(2)).to_string() == "1101");
  CHECK_THROWS_AS(apply(s, Literal::pos(4)), InvalidArgument);
}

TEST_CASE("step and applicability") {
  const Action a{Literal::neg(5), Literal::pos(0), 5};
  CHECK(applicable(State::zeros(6), a));
  CHECK(step(State::zeros(6), a).to_string() == "100000");
  CHECK_THROWS_AS(step(State::from_string("000001"), a), NotApplicable);
  // An applicable action whose effect already holds is a self-loop.
  const Action b{Literal::neg(1), Literal::neg(0), 0};
  CHECK(step(State::zeros(2), b) == State::zeros(2));
}

TEST_CASE("validate_plan replays the P_6 chain") {
  const Instance p = fixtures::p6_with_goal();
  const auto states = fixtures::p6_chain_states();
  REQUIRE(states.size() == 31);
  const Plan plan = fixtures::plan_through(p, states);
  CHECK(plan.length() == 30);
  CHECK(plan.steps.front() == 5);
  const Trace t = validate_plan(p, plan);
  CHECK(t.states == states);
  CHECK(t.final_state().to_string() == "101101");

  SUBCASE("empty plan") {
    Instance q = gen_P(6);
    CHECK(validate_plan(q, Plan{}).states.size() == 1);
    q.goal = State::from_string("100000");
    CHECK_THROWS_AS(validate_plan(q, Plan{}), GoalMismatch);
  }
  SUBCASE("inapplicable step reports its index") {
    Plan bad = plan;
    bad.steps[0] = 0;  // <+v0,+v1> needs v0
    try {
      validate_plan(p, bad);
      FAIL("expected NotApplicable");
    } catch (const NotApplicable& e) {
      CHECK(e.step_index == 0);
      CHECK(e.action == 0);
    }
  }
  SUBCASE("unknown action id") {
    CHECK_THROWS_AS(validate_plan(p, Plan{{99}}), InvalidArgument);
  }
}

TEST_CASE("enumerate_all_actions") {
  for (int n = 2; n <= 6; ++n) {
    const auto all = enumerate_all_actions(n);
    CHECK(all.size() == static_cast<std::size_t>(4 * n * n - 4 * n));
    std::set<std::pair<int, int>> distinct;
    for (std::size_t i = 0; i < all.size(); ++i) {
      CHECK(all[i].canonical());
      CHECK(all[i].id == static_cast<int>(i));
      CHECK(canonical_index(all[i], n) == static_cast<int>(i));
      distinct.emplace(all[i].pre.to_signed(), all[i].eff.to_signed());
    }
    CHECK(distinct.size() == all.size());
  }
  // Effect variable, effect polarity (+ first), precondition variable, polarity.
  const auto two = enumerate_all_actions(2);
  CHECK(two[0].eff == Literal::pos(0));
  CHECK(two[0].pre == Literal::pos(1));
  CHECK(two[1].pre == Literal::neg(1));
  CHECK(two[2].eff == Literal::neg(0));
  CHECK(two[4].eff == Literal::pos(1));
  CHECK(two[4].pre == Literal::pos(0));
  CHECK_THROWS_AS(enumerate_all_actions(1), InvalidArgument);
  CHECK_THROWS_AS(canonical_index(Action{Literal::pos(0), Literal::neg(0), 0}, 2), InvalidArgument);
}

TEST_CASE("instance checks") {
  CHECK_THROWS_AS(make_instance(2, {{Literal::pos(0), Literal::pos(2)}}, State::zeros(2)), InvalidArgument);
  CHECK_THROWS_AS(make_instance(2, {}, State::zeros(3)), InvalidArgument);
  CHECK_THROWS_AS(make_instance(2, {}, State::zeros(2), State::zeros(1)), InvalidArgument);
  Instance p = make_instance(2, {{Literal::pos(0), Literal::pos(1)}}, State::zeros(2));
  CHECK(p.canonical());
  p.actions[0].id = 3;
  CHECK_THROWS_AS(p.check(), InvalidArgument);
}

namespace {

std::set<std::pair<std::uint64_t, std::uint64_t>> edges(const Instance& p) {
  std::set<std::pair<std::uint64_t, std::uint64_t>> out;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << p.n); ++s) {
    for (auto t : fixtures::successors(p, s)) out.emplace(s, t);
  }
  return out;
}

}  // namespace

TEST_CASE("normalize keeps the state graph") {
  using L = Literal;
  SUBCASE("opposite literal on one variable") {
    const Instance p = make_instance(3, {{L::pos(1), L::neg(1)}}, State::zeros(3));
    const Instance q = normalize(p);
    CHECK(q.canonical());
    CHECK(q.actions.size() == 2);
    CHECK(edges(p) == edges(q));
    CHECK(normalize(gen_P(6)) == gen_P(6));
  }
  SUBCASE("<l,l> has no edges and is dropped") {
    const Instance p = make_instance(2, {{L::pos(0), L::pos(0)}, {L::pos(0), L::pos(1)}}, State::zeros(2));
    const Instance q = normalize(p);
    CHECK(q.actions.size() == 1);
    CHECK(edges(p) == edges(q));
  }
  SUBCASE("random mixtures") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = static_cast<int>(rng.between(2, 5));
      std::vector<std::pair<Literal, Literal>> acts;
      const int m = static_cast<int>(rng.between(0, 8));
      for (int i = 0; i < m; ++i) {
        const Literal pre{static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), rng.below(2) == 1};
        const Literal eff{static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), rng.below(2) == 1};
        acts.emplace_back(pre, eff);
      }
      const Instance p = make_instance(n, acts, State::zeros(n));
      const Instance q = normalize(p);
      CHECK(q.canonical());
      CHECK(edges(p) == edges(q));
    }
  }
  SUBCASE("one variable cannot be normalized") {
    const Instance p = make_instance(1, {{L::pos(0), L::neg(0)}}, State::zeros(1));
    CHECK_THROWS_AS(normalize(p), InvalidArgument);
  }
}

TEST_CASE("instance text format") {
  const Instance p = fixtures::example4();
  const std::string text = serialize_instance(p);
  CHECK(parse_instance(text) == p);
  CHECK(text.find("goal 1011") != std::string::npos);
  CHECK(parse_instance(serialize_instance(gen_P(9))) == gen_P(9));

  const Instance q = parse_instance("# comment\nvars 3\n\ninit 010  # trailing\naction -1 2\n");
  CHECK(q.n == 3);
  CHECK(q.init.to_string() == "010");
  CHECK_FALSE(q.goal);
  REQUIRE(q.actions.size() == 1);
  CHECK(q.actions[0].pre == Literal::neg(0));
  CHECK(q.actions[0].eff == Literal::pos(1));

  auto error_line = [](std::string_view src) {
    try {
      parse_instance(src);
    } catch (const ParseError& e) {
      return e.line;
    }
    return -1;
  };
  CHECK(error_line("vars 2\ninit 00\naction 1 3\n") == 3);
  CHECK(error_line("vars 2\ninit 00\naction 1 x\n") == 3);
  CHECK(error_line("vars 2\ninit 000\n") == 2);
  CHECK(error_line("vars 2\nvars 2\n") == 2);
  CHECK(error_line("vars 2\ninit 00\nfoo\n") == 3);
  CHECK(error_line("init 00\n") == 1);
  CHECK(error_line("vars 2\n") >= 1);
  CHECK(error_line("vars 2\ninit 00\naction 1 1\n") == 3);
  CHECK(error_line("vars 2\ninit 00\naction 1\n") == 3);
  CHECK_THROWS_AS(load_instance("/nonexistent/file.strips"), std::ios_base::failure);
}

TEST_CASE("plan JSON") {
  const Instance p = fixtures::p6_with_goal();
  const Plan plan = fixtures::plan_through(p, fixtures::p6_chain_states());
  const auto j = plan_to_json(plan, validate_plan(p, plan));
  CHECK(j["steps"].size() == 30);
  CHECK(j["trace"].size() == 31);
  CHECK(plan_from_json(j) == plan);
  CHECK(plan_from_json(nlohmann::json::parse(R"({"steps": []})")).steps.empty());
  CHECK_THROWS_AS(plan_from_json(nlohmann::json::parse(R"({"steps": ["a"]})")), InvalidArgument);
  CHECK_THROWS_AS(plan_from_json(nlohmann::json::parse("{}")), InvalidArgument);
}
