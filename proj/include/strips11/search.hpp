#pragma once

// Explicit search over the 2^n state hypercube.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "strips11/core.hpp"

namespace strips11 {

class CapExceeded : public Error {
 public:
  using Error::Error;
};

class Unreachable : public Error {
 public:
  using Error::Error;
};

struct SearchOptions {
  /// Refuse instances with more variables (2^n distance entries).
  int max_vars = 26;
  /// Parent pointers cost one int32 per state; skip them for distance-only runs.
  bool record_parents = true;
  int threads = 1;
};

/// Directed hypercube edges induced by one action: the states where the
/// precondition holds and the effect does not. 2^{n-2} for canonical actions.
std::uint64_t induced_edge_count(const Action& a, int n);

class DistanceMap {
 public:
  static constexpr std::uint32_t kUnreached = UINT32_MAX;

  int n() const { return n_; }
  const State& start() const { return start_; }
  bool has_parents() const { return !parent_action_.empty(); }

  std::uint32_t distance(const State& s) const { return dist_[index(s)]; }
  bool reached(const State& s) const { return distance(s) != kUnreached; }
  /// Lowest-id action on a shortest edge into s; empty for the start and for
  /// unreached states.
  std::optional<int> parent_action(const State& s) const;
  std::optional<State> parent_state(const State& s) const;

  std::span<const std::uint32_t> distances() const { return dist_; }
  std::uint64_t reached_count() const { return reached_; }
  std::uint32_t max_distance() const { return max_distance_; }

 private:
  friend DistanceMap bfs_from(const Instance&, const State&, const SearchOptions&);
  std::size_t index(const State& s) const;

  int n_ = 0;
  State start_;
  std::vector<std::uint32_t> dist_;
  std::vector<std::int32_t> parent_action_;
  std::vector<std::uint64_t> eff_mask_;
  std::uint64_t reached_ = 0;
  std::uint32_t max_distance_ = 0;
};

/// Exact BFS distances in the state graph of p from start.
DistanceMap bfs_from(const Instance& p, const State& start, const SearchOptions& options = {});

struct Eccentricity {
  std::uint32_t value = 0;
  /// All states at maximal distance, in increasing bit order.
  std::vector<State> farthest;
};

Eccentricity eccentricity(const Instance& p, const State& start,
                          const SearchOptions& options = {});
Eccentricity eccentricity(const DistanceMap& dm);

Plan extract_shortest_plan(const Instance& p, const State& start, const State& goal,
                           const SearchOptions& options = {});
/// Walks parent pointers; dm must have been built with parents.
Plan extract_shortest_plan(const DistanceMap& dm, const State& goal);

struct ExhaustiveOptions {
  int threads = 1;
  /// Required for n > 3: number of random action subsets to evaluate.
  std::optional<std::uint64_t> samples;
  std::uint64_t seed = 0;
  /// Largest sample count accepted in sampling mode.
  std::uint64_t budget = 1'000'000;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

struct ExhaustiveResult {
  int n = 0;
  /// Eccentricity from 0^n of the witness.
  std::uint32_t value = 0;
  /// Subset of enumerate_all_actions(n), bit i = action i. Least mask among
  /// maximizers in full enumeration; least sampled maximizer otherwise.
  std::uint64_t witness_mask = 0;
  Instance witness;
  std::uint64_t subsets_evaluated = 0;
  bool exhaustive = false;
  /// Number of subsets per eccentricity value (full enumeration only).
  std::vector<std::uint64_t> histogram;
};

/// Maximizes the eccentricity from 0^n over action subsets. Enumerates all
/// 2^{4n^2-4n} subsets for n <= 3 and samples otherwise.
ExhaustiveResult exhaustive_max(int n, const ExhaustiveOptions& options = {});

/// Instance over the canonical action set of n variables, deterministic in
/// (n, seed). Starts at 0^n with no goal. With force_good the result
/// satisfies is_good.
Instance random_instance(int n, std::uint64_t seed, bool force_good);

/// Portable splitmix64-based generator; identical sequences on every
/// platform, which std distributions do not guarantee.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  /// Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

 private:
  std::uint64_t state_;
};

}  // namespace strips11
