#pragma once

// Goodness, bidirectional edges and the omitted-states bound for shortest
// plans in good instances.

#include <cstdint>
#include <vector>

#include "strips11/core.hpp"
#include "strips11/search.hpp"

namespace strips11 {

/// Every variable v has achievers a (eff +v) and b (eff -v) whose
/// preconditions are not negations of each other.
bool is_good(const Instance& p);
bool is_good_variable(const Instance& p, int v);

/// Coordinate-v hypercube edges present in both directions.
std::uint64_t bidirectional_count(const Instance& p, VarId v);

/// Number of bidirectional edges incident to s.
int bidirectional_degree(const Instance& p, const State& s);

/// States with at least n/4 bidirectional incidences (4 * degree >= n).
std::vector<State> heavy_vertices(const Instance& p);

struct BidirReport {
  int n = 0;
  std::vector<std::uint64_t> per_coordinate;
  std::uint64_t total = 0;
  std::uint64_t heavy_count = 0;
  bool lemma_coordinates_ok = false;  // every coordinate >= 2^{n-3}
  bool lemma_heavy_ok = false;        // heavy_count >= 2^{n-2}
};

BidirReport bidirectional_report(const Instance& p);

class NotGood : public Error {
 public:
  using Error::Error;
};

struct OmissionReport {
  std::uint64_t plan_length = 0;
  std::uint64_t visited = 0;
  std::uint64_t omitted = 0;
  /// Omitted-state floor that applies at this n (0 below 12 variables).
  std::uint64_t required = 0;
  bool theorem_ok = false;
};

/// Measures the deterministic shortest plan from start to goal. Throws
/// NotGood and Unreachable.
OmissionReport check_omission(const Instance& p, const State& start, const State& goal,
                              const SearchOptions& options = {});

}  // namespace strips11
