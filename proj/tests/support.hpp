#pragma once

// Shared fixtures: the known 30-step P_6 chain and the four-variable example.

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "strips11/core.hpp"
#include "strips11/generators.hpp"
#include "strips11/litgraph.hpp"
#include "strips11/search.hpp"

namespace fixtures {

using namespace strips11;

// Farthest state first, as printed; reversed by p6_chain_states().
inline constexpr std::string_view kP6ChainBackwards =
    "101101 101001 101011 101010 001010 011010 010010 010110 010100 010101 110101 100101 "
    "000101 001101 011101 111101 111001 110001 100001 000001 000011 000111 001111 011111 "
    "111111 111110 111100 111000 110000 100000 000000";

inline std::vector<State> p6_chain_states() {
  std::vector<State> out;
  std::string_view rest = kP6ChainBackwards;
  while (!rest.empty()) {
    const auto sp = rest.find(' ');
    out.push_back(State::from_string(rest.substr(0, sp)));
    rest = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp + 1);
  }
  return {out.rbegin(), out.rend()};
}

// Lowest-id action taking each state to the next one.
inline Plan plan_through(const Instance& p, const std::vector<State>& states) {
  Plan plan;
  for (std::size_t i = 0; i + 1 < states.size(); ++i) {
    bool found = false;
    for (const Action& a : p.actions) {
      if (applicable(states[i], a) && step(states[i], a) == states[i + 1]) {
        plan.steps.push_back(a.id);
        found = true;
        break;
      }
    }
    if (!found) throw std::runtime_error("no action for step " + std::to_string(i));
  }
  return plan;
}

inline Instance p6_with_goal() {
  Instance p = gen_P(6);
  p.goal = State::from_string("101101");
  return p;
}

// Four-variable example, transitions T1..T9 in order: start 0000, goal 1011.
inline Instance example4() {
  using L = Literal;
  return make_instance(4,
                       {
                           {L::pos(3), L::neg(0)},
                           {L::neg(3), L::pos(0)},
                           {L::neg(2), L::pos(0)},
                           {L::pos(0), L::pos(1)},
                           {L::neg(0), L::neg(1)},
                           {L::pos(1), L::pos(2)},
                           {L::neg(1), L::neg(2)},
                           {L::pos(2), L::pos(3)},
                           {L::neg(2), L::neg(3)},
                       },
                       State::from_string("0000"), State::from_string("1011"));
}

inline constexpr std::string_view kExample4Listing =
    "Agent 0: 0(0) 4(1) 4(1) 4(1) 4(1) 4(1) 0(0) 0(0) 0(0) 4(1) 0(0) 4(1)\n"
    "Agent 1: 1(0) 1(0) 5(1) 5(1) 5(1) 5(1) 5(1) 1(0) 1(0) 1(0) 5(1) 1(0)\n"
    "Agent 2: 2(0) 2(0) 2(0) 6(1) 6(1) 6(1) 6(1) 6(1) 2(0) 2(0) 2(0) 6(1)\n"
    "Agent 3: 3(0) 3(0) 3(0) 3(0) 7(1) 7(1) 7(1) 7(1) 7(1) 7(1) 7(1) 7(1)\n";

// Straightforward successor enumeration used as an oracle by several tests.
inline std::vector<std::uint64_t> successors(const Instance& p, std::uint64_t s) {
  std::vector<std::uint64_t> out;
  const State st(p.n, s);
  for (const Action& a : p.actions) {
    if (applicable(st, a)) {
      const auto t = step(st, a).bits();
      if (t != s) out.push_back(t);
    }
  }
  return out;
}

// Direct transcription of the three-case subplan recursion, no memo.
inline Subplan naive_subplan(const Instance& p, const Plan& plan, Literal l, std::size_t i) {
  for (std::size_t q = i; q-- > 0;) {
    const Action& a = p.actions[static_cast<std::size_t>(plan.steps[q])];
    if (a.eff != l) continue;
    Subplan r = naive_subplan(p, plan, a.pre, q);
    if (!r.legal) return r;
    r.positions.push_back(q);
    return r;
  }
  return holds(p.init, l) ? Subplan{} : Subplan::illegal();
}

// Random walk of up to `steps` actions from init; the goal is where it ends.
inline std::pair<Instance, Plan> random_walk(std::uint64_t seed, int n, std::size_t steps) {
  Instance p = random_instance(n, seed, seed % 2 == 0);
  Rng rng(seed ^ 0x5eed);
  Plan plan;
  State s = p.init;
  for (std::size_t k = 0; k < steps; ++k) {
    std::vector<int> moves;
    for (const Action& a : p.actions) {
      if (applicable(s, a)) moves.push_back(a.id);
    }
    if (moves.empty()) break;
    const int id = moves[rng.below(moves.size())];
    plan.steps.push_back(id);
    s = step(s, p.actions[static_cast<std::size_t>(id)]);
  }
  p.goal = s;
  return {p, plan};
}

}  // namespace fixtures
