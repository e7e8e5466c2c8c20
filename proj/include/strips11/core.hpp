#pragma once

// Instance model for STRIPS planning with one precondition literal and one
// effect literal per action.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace strips11 {

/// Largest variable count a State can hold (one bit per variable).
inline constexpr int kMaxVars = 64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

struct VarId {
  int index = 0;
  friend constexpr bool operator==(VarId, VarId) = default;
  friend constexpr auto operator<=>(VarId, VarId) = default;
};

struct Literal {
  int var = 0;
  bool positive = true;

  static constexpr Literal pos(int v) { return {v, true}; }
  static constexpr Literal neg(int v) { return {v, false}; }

  /// Signed 1-based DIMACS-style form: +v0 -> 1, -v2 -> -3.
  int to_signed() const { return positive ? var + 1 : -(var + 1); }
  static Literal from_signed(int s);

  /// "+v3" / "-v3".
  std::string to_string() const;

  /// Dense index in [0, 2n): negative literal of v is v, positive is n + v.
  int node(int n) const { return positive ? n + var : var; }
  static Literal from_node(int node, int n) {
    return node >= n ? pos(node - n) : neg(node);
  }

  friend constexpr bool operator==(Literal, Literal) = default;
  friend constexpr auto operator<=>(Literal, Literal) = default;
};

constexpr Literal negate(Literal l) { return {l.var, !l.positive}; }

/// Truth assignment over n variables. Bit v holds variable v. The string
/// form writes variable 0 as the leftmost character.
class State {
 public:
  State() = default;
  State(int width, std::uint64_t bits);

  static State zeros(int width) { return State(width, 0); }
  static State from_string(std::string_view bits);

  int width() const { return width_; }
  std::uint64_t bits() const { return bits_; }
  bool get(int v) const;
  std::string to_string() const;

  friend bool operator==(const State&, const State&) = default;
  friend auto operator<=>(const State&, const State&) = default;

 private:
  std::uint64_t bits_ = 0;
  int width_ = 0;
};

struct Action {
  Literal pre;
  Literal eff;
  int id = 0;

  bool canonical() const { return pre.var != eff.var; }
  std::string to_string() const;

  friend bool operator==(const Action&, const Action&) = default;
};

struct Instance {
  int n = 0;
  std::vector<Action> actions;
  State init;
  std::optional<State> goal;

  /// Throws InvalidArgument when a literal or state does not fit n or an
  /// action id differs from its list position.
  void check() const;
  bool canonical() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Builds an instance from (pre, eff) pairs; ids follow list order.
Instance make_instance(int n, const std::vector<std::pair<Literal, Literal>>& actions,
                       State init, std::optional<State> goal = std::nullopt);

struct Plan {
  std::vector<int> steps;
  std::size_t length() const { return steps.size(); }
  friend bool operator==(const Plan&, const Plan&) = default;
};

struct Trace {
  std::vector<State> states;
  const State& final_state() const { return states.back(); }
};

class NotApplicable : public Error {
 public:
  NotApplicable(int action, State state, std::size_t step_index);
  int action;
  State state;
  std::size_t step_index;
};

/// A goal state is required but the instance has none.
class MissingGoal : public Error {
 public:
  using Error::Error;
};

class GoalMismatch : public Error {
 public:
  GoalMismatch(State final_state, State goal);
  State final_state;
  State goal;
};

bool holds(const State& s, Literal l);
State apply(const State& s, Literal l);
bool applicable(const State& s, const Action& a);
State step(const State& s, const Action& a);

/// Replays the plan from the initial state. When the instance has a goal the
/// final state must equal it.
Trace validate_plan(const Instance& p, const Plan& plan);

/// Rewrites actions whose precondition and effect share a variable into the
/// canonical form. Step-equivalent on the original state space.
Instance normalize(const Instance& p);

/// All 4n^2 - 4n canonical actions ordered by effect variable, effect
/// polarity (positive first), precondition variable, precondition polarity.
std::vector<Action> enumerate_all_actions(int n);

/// Position of a canonical action in enumerate_all_actions(n).
int canonical_index(const Action& a, int n);

}  // namespace strips11
