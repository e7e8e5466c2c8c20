#include "strips11/core.hpp"

#include <algorithm>
#include <fmt/core.h>

namespace strips11 {

namespace {

void check_var(int var, int width) {
  if (var < 0 || var >= width) {
    throw InvalidArgument("variable " + std::to_string(var) + " out of range for " +
                          std::to_string(width) + " variables");
  }
}

}  // namespace

Literal Literal::from_signed(int s) {
  if (s == 0) throw InvalidArgument("literal 0 is not a variable");
  return s > 0 ? pos(s - 1) : neg(-s - 1);
}

std::string Literal::to_string() const {
  return (positive ? "+v" : "-v") + std::to_string(var);
}

State::State(int width, std::uint64_t bits) : bits_(bits), width_(width) {
  if (width < 0 || width > kMaxVars) {
    throw InvalidArgument("state width " + std::to_string(width) + " outside [0, 64]");
  }
  if (width < kMaxVars && (bits >> width) != 0) {
    throw InvalidArgument("state bits exceed width " + std::to_string(width));
  }
}

State State::from_string(std::string_view bits) {
  if (bits.size() > static_cast<std::size_t>(kMaxVars)) {
    throw InvalidArgument("state string longer than 64 characters");
  }
  std::uint64_t word = 0;
  for (std::size_t v = 0; v < bits.size(); ++v) {
    if (bits[v] == '1') {
      word |= std::uint64_t{1} << v;
    } else if (bits[v] != '0') {
      throw InvalidArgument("state string must contain only 0 and 1: '" + std::string(bits) + "'");
    }
  }
  return State(static_cast<int>(bits.size()), word);
}

bool State::get(int v) const {
  check_var(v, width_);
  return (bits_ >> v) & 1U;
}

std::string State::to_string() const {
  std::string out(static_cast<std::size_t>(width_), '0');
  for (int v = 0; v < width_; ++v) {
    if ((bits_ >> v) & 1U) out[static_cast<std::size_t>(v)] = '1';
  }
  return out;
}

std::string Action::to_string() const {
  return fmt::format("a{}=<{},{}>", id, pre.to_string(), eff.to_string());
}

void Instance::check() const {
  if (n < 0 || n > kMaxVars) throw InvalidArgument("variable count outside [0, 64]");
  if (init.width() != n) throw InvalidArgument("initial state width differs from vars");
  if (goal && goal->width() != n) throw InvalidArgument("goal state width differs from vars");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const Action& a = actions[i];
    check_var(a.pre.var, n);
    check_var(a.eff.var, n);
    if (a.id != static_cast<int>(i)) {
      throw InvalidArgument("action id " + std::to_string(a.id) + " at position " +
                            std::to_string(i));
    }
  }
}

bool Instance::canonical() const {
  return std::ranges::all_of(actions, [](const Action& a) { return a.canonical(); });
}

Instance make_instance(int n, const std::vector<std::pair<Literal, Literal>>& actions,
                       State init, std::optional<State> goal) {
  Instance p;
  p.n = n;
  p.init = init;
  p.goal = goal;
  p.actions.reserve(actions.size());
  for (const auto& [pre, eff] : actions) {
    p.actions.push_back(Action{pre, eff, static_cast<int>(p.actions.size())});
  }
  p.check();
  return p;
}

NotApplicable::NotApplicable(int action, State state, std::size_t step_index)
    : Error(fmt::format("action {} not applicable in state {} at step {}", action,
                        state.to_string(), step_index)),
      action(action),
      state(state),
      step_index(step_index) {}

GoalMismatch::GoalMismatch(State final_state, State goal)
    : Error("plan ends in " + final_state.to_string() + " but goal is " + goal.to_string()),
      final_state(final_state),
      goal(goal) {}

bool holds(const State& s, Literal l) { return s.get(l.var) == l.positive; }

State apply(const State& s, Literal l) {
  check_var(l.var, s.width());
  const std::uint64_t mask = std::uint64_t{1} << l.var;
  return State(s.width(), l.positive ? (s.bits() | mask) : (s.bits() & ~mask));
}

bool applicable(const State& s, const Action& a) { return holds(s, a.pre); }

State step(const State& s, const Action& a) {
  if (!applicable(s, a)) throw NotApplicable(a.id, s, 0);
  return apply(s, a.eff);
}

Trace validate_plan(const Instance& p, const Plan& plan) {
  Trace trace;
  trace.states.reserve(plan.steps.size() + 1);
  trace.states.push_back(p.init);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const int id = plan.steps[i];
    if (id < 0 || static_cast<std::size_t>(id) >= p.actions.size()) {
      throw InvalidArgument(fmt::format("plan step {} references unknown action {}", i, id));
    }
    const Action& a = p.actions[static_cast<std::size_t>(id)];
    const State& s = trace.states.back();
    if (!applicable(s, a)) throw NotApplicable(id, s, i);
    trace.states.push_back(apply(s, a.eff));
  }
  if (p.goal && trace.final_state() != *p.goal) {
    throw GoalMismatch(trace.final_state(), *p.goal);
  }
  return trace;
}

Instance normalize(const Instance& p) {
  p.check();
  Instance out;
  out.n = p.n;
  out.init = p.init;
  out.goal = p.goal;
  auto push = [&out](Literal pre, Literal eff) {
    out.actions.push_back(Action{pre, eff, static_cast<int>(out.actions.size())});
  };
  for (const Action& a : p.actions) {
    if (a.canonical()) {
      push(a.pre, a.eff);
      continue;
    }
    if (p.n < 2) {
      throw InvalidArgument("cannot normalize " + a.to_string() + " with fewer than 2 variables");
    }
    // <l, l> only fires when its effect already holds: no edges.
    if (a.pre == a.eff) continue;
    const int u = a.eff.var == 0 ? 1 : 0;
    push(Literal::pos(u), a.eff);
    push(Literal::neg(u), a.eff);
  }
  return out;
}

std::vector<Action> enumerate_all_actions(int n) {
  if (n < 2) throw InvalidArgument("enumerate_all_actions requires n >= 2");
  if (n > kMaxVars) throw InvalidArgument("enumerate_all_actions requires n <= 64");
  std::vector<Action> out;
  out.reserve(static_cast<std::size_t>(4 * n * n - 4 * n));
  for (int ev = 0; ev < n; ++ev) {
    for (bool epos : {true, false}) {
      for (int pv = 0; pv < n; ++pv) {
        if (pv == ev) continue;
        for (bool ppos : {true, false}) {
          out.push_back(Action{{pv, ppos}, {ev, epos}, static_cast<int>(out.size())});
        }
      }
    }
  }
  return out;
}

int canonical_index(const Action& a, int n) {
  if (!a.canonical()) throw InvalidArgument("canonical_index of non-canonical " + a.to_string());
  check_var(a.pre.var, n);
  check_var(a.eff.var, n);
  const int pre_slot = a.pre.var < a.eff.var ? a.pre.var : a.pre.var - 1;
  return ((a.eff.var * 2 + (a.eff.positive ? 0 : 1)) * (n - 1) + pre_slot) * 2 +
         (a.pre.positive ? 0 : 1);
}

}  // namespace strips11
