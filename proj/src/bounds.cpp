#include "strips11/bounds.hpp"

#include <algorithm>
#include <bit>

namespace strips11 {

namespace {

void require_canonical(const Instance& p) {
  p.check();
  if (!p.canonical()) throw InvalidArgument("instance is not canonical; normalize it first");
}

// Literal set as two masks: the set is satisfied by s when s has a positive
// literal's bit set or a negative literal's bit clear.
struct LiteralSet {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;

  void add(Literal l) { (l.positive ? pos : neg) |= std::uint64_t{1} << l.var; }
  bool satisfied_by(std::uint64_t s) const { return (s & pos) != 0 || (~s & neg) != 0; }

  // Assignments over `free_vars` variables in which every literal is false.
  std::uint64_t none_true(int free_vars) const {
    if ((pos & neg) != 0) return 0;
    return std::uint64_t{1} << (free_vars - std::popcount(pos | neg));
  }

  LiteralSet operator|(const LiteralSet& o) const { return {pos | o.pos, neg | o.neg}; }
};

struct Achievers {
  LiteralSet up;
  LiteralSet down;
};

std::vector<Achievers> achievers_by_variable(const Instance& p) {
  std::vector<Achievers> out(static_cast<std::size_t>(p.n));
  for (const Action& a : p.actions) {
    auto& slot = out[static_cast<std::size_t>(a.eff.var)];
    (a.eff.positive ? slot.up : slot.down).add(a.pre);
  }
  return out;
}

}  // namespace

bool is_good_variable(const Instance& p, int v) {
  for (const Action& a : p.actions) {
    if (a.eff != Literal::pos(v)) continue;
    for (const Action& b : p.actions) {
      if (b.eff == Literal::neg(v) && a.pre != negate(b.pre)) return true;
    }
  }
  return false;
}

bool is_good(const Instance& p) {
  if (p.n == 0) return false;
  for (int v = 0; v < p.n; ++v) {
    if (!is_good_variable(p, v)) return false;
  }
  return true;
}

std::uint64_t bidirectional_count(const Instance& p, VarId v) {
  require_canonical(p);
  if (v.index < 0 || v.index >= p.n) throw InvalidArgument("coordinate out of range");
  const Achievers ach = achievers_by_variable(p)[static_cast<std::size_t>(v.index)];
  // Edges of coordinate v are indexed by the other n-1 bits; both endpoints
  // agree on every precondition. Count edges where some up precondition and
  // some down precondition hold, by inclusion-exclusion over the complements.
  const int free_vars = p.n - 1;
  const std::uint64_t total = std::uint64_t{1} << free_vars;
  return total - ach.up.none_true(free_vars) - ach.down.none_true(free_vars) +
         (ach.up | ach.down).none_true(free_vars);
}

int bidirectional_degree(const Instance& p, const State& s) {
  require_canonical(p);
  const auto ach = achievers_by_variable(p);
  int degree = 0;
  for (const auto& a : ach) {
    if (a.up.satisfied_by(s.bits()) && a.down.satisfied_by(s.bits())) ++degree;
  }
  return degree;
}

std::vector<State> heavy_vertices(const Instance& p) {
  require_canonical(p);
  if (p.n > 26) throw CapExceeded("heavy_vertices enumerates 2^n states; n is capped at 26");
  const auto ach = achievers_by_variable(p);
  std::vector<State> out;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << p.n); ++s) {
    int degree = 0;
    for (const auto& a : ach) {
      if (a.up.satisfied_by(s) && a.down.satisfied_by(s)) ++degree;
    }
    if (4 * degree >= p.n) out.emplace_back(p.n, s);
  }
  return out;
}

BidirReport bidirectional_report(const Instance& p) {
  BidirReport r;
  r.n = p.n;
  for (int v = 0; v < p.n; ++v) {
    r.per_coordinate.push_back(bidirectional_count(p, VarId{v}));
    r.total += r.per_coordinate.back();
  }
  r.heavy_count = heavy_vertices(p).size();
  const std::uint64_t coord_floor = p.n >= 3 ? std::uint64_t{1} << (p.n - 3) : 1;
  r.lemma_coordinates_ok = std::ranges::all_of(
      r.per_coordinate, [&](std::uint64_t c) { return c >= coord_floor; });
  r.lemma_heavy_ok = p.n >= 2 && r.heavy_count >= (std::uint64_t{1} << (p.n - 2));
  return r;
}

OmissionReport check_omission(const Instance& p, const State& start, const State& goal,
                              const SearchOptions& options) {
  require_canonical(p);
  if (!is_good(p)) throw NotGood("instance is not good");
  const Plan plan = extract_shortest_plan(p, start, goal, options);

  Instance replay = p;
  replay.init = start;
  replay.goal = goal;
  const Trace trace = validate_plan(replay, plan);
  std::vector<std::uint64_t> seen;
  for (const State& s : trace.states) seen.push_back(s.bits());
  std::ranges::sort(seen);
  const auto dup = std::ranges::unique(seen);
  seen.erase(dup.begin(), dup.end());

  OmissionReport r;
  r.plan_length = plan.length();
  r.visited = seen.size();
  r.omitted = (std::uint64_t{1} << p.n) - r.visited;
  if (p.n >= 16) {
    r.required = std::uint64_t{1} << (p.n - 2);
  } else if (p.n >= 12) {
    r.required = std::uint64_t{1} << (p.n - 3);
  }
  r.theorem_ok = r.omitted >= r.required;
  return r;
}

}  // namespace strips11
