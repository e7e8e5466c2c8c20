#include "strips11/search.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <thread>

#include <fmt/core.h>

#include "strips11/bounds.hpp"

namespace strips11 {

namespace {

// Bit masks for one action: fires on u when (u & pre_mask) == pre_bits and
// (u & eff_mask) != eff_bits; the successor is u ^ eff_mask.
struct CompiledAction {
  std::uint64_t pre_mask;
  std::uint64_t pre_bits;
  std::uint64_t eff_mask;
  std::uint64_t eff_bits;

  explicit CompiledAction(const Action& a)
      : pre_mask(std::uint64_t{1} << a.pre.var),
        pre_bits(a.pre.positive ? pre_mask : 0),
        eff_mask(std::uint64_t{1} << a.eff.var),
        eff_bits(a.eff.positive ? eff_mask : 0) {}

  bool fires(std::uint64_t u) const {
    return (u & pre_mask) == pre_bits && (u & eff_mask) != eff_bits;
  }
};

std::vector<CompiledAction> compile_actions(const Instance& p) {
  std::vector<CompiledAction> out;
  out.reserve(p.actions.size());
  for (const Action& a : p.actions) out.emplace_back(a);
  return out;
}

void expand_range(std::span<const std::uint64_t> frontier, std::span<const CompiledAction> actions,
                  std::vector<std::uint32_t>& dist, std::uint32_t level,
                  std::vector<std::uint64_t>& next) {
  for (const std::uint64_t u : frontier) {
    for (const CompiledAction& a : actions) {
      if (!a.fires(u)) continue;
      const std::uint64_t w = u ^ a.eff_mask;
      if (dist[w] == DistanceMap::kUnreached) {
        dist[w] = level;
        next.push_back(w);
      }
    }
  }
}

void expand_range_atomic(std::span<const std::uint64_t> frontier,
                         std::span<const CompiledAction> actions, std::vector<std::uint32_t>& dist,
                         std::uint32_t level, std::vector<std::uint64_t>& next) {
  for (const std::uint64_t u : frontier) {
    for (const CompiledAction& a : actions) {
      if (!a.fires(u)) continue;
      const std::uint64_t w = u ^ a.eff_mask;
      std::atomic_ref<std::uint32_t> slot(dist[w]);
      std::uint32_t expected = DistanceMap::kUnreached;
      if (slot.load(std::memory_order_relaxed) == expected &&
          slot.compare_exchange_strong(expected, level, std::memory_order_relaxed)) {
        next.push_back(w);
      }
    }
  }
}

}  // namespace

std::uint64_t induced_edge_count(const Action& a, int n) {
  if (n < 1 || n > kMaxVars || a.pre.var >= n || a.eff.var >= n) {
    throw InvalidArgument("induced_edge_count: action does not fit n");
  }
  // States with pre and not-eff.
  if (a.pre.var != a.eff.var) return std::uint64_t{1} << (n - 2);
  if (a.pre == negate(a.eff)) return std::uint64_t{1} << (n - 1);
  return 0;
}

std::size_t DistanceMap::index(const State& s) const {
  if (s.width() != n_) throw InvalidArgument("state width differs from the searched instance");
  return static_cast<std::size_t>(s.bits());
}

std::optional<int> DistanceMap::parent_action(const State& s) const {
  if (!has_parents()) throw Error("distance map was built without parents");
  const std::int32_t a = parent_action_[index(s)];
  if (a < 0) return std::nullopt;
  return a;
}

std::optional<State> DistanceMap::parent_state(const State& s) const {
  const auto a = parent_action(s);
  if (!a) return std::nullopt;
  return State(n_, s.bits() ^ eff_mask_[static_cast<std::size_t>(*a)]);
}

DistanceMap bfs_from(const Instance& p, const State& start, const SearchOptions& options) {
  p.check();
  if (start.width() != p.n) throw InvalidArgument("start state width differs from vars");
  const int cap = std::min(options.max_vars, 32);
  if (p.n > cap) {
    throw CapExceeded(fmt::format("{} variables exceed the search cap of {}", p.n, cap));
  }

  DistanceMap dm;
  dm.n_ = p.n;
  dm.start_ = start;
  const std::size_t size = std::size_t{1} << p.n;
  dm.dist_.assign(size, DistanceMap::kUnreached);

  const auto actions = compile_actions(p);
  for (const auto& a : actions) dm.eff_mask_.push_back(a.eff_mask);

  const int threads = std::max(1, options.threads);
  std::vector<std::uint64_t> frontier{start.bits()};
  dm.dist_[start.bits()] = 0;
  dm.reached_ = 1;
  std::uint32_t level = 0;
  while (!frontier.empty()) {
    ++level;
    std::vector<std::uint64_t> next;
    if (threads == 1 || frontier.size() < 4096) {
      expand_range(frontier, actions, dm.dist_, level, next);
    } else {
      std::vector<std::vector<std::uint64_t>> parts(static_cast<std::size_t>(threads));
      std::vector<std::thread> pool;
      const std::size_t chunk = (frontier.size() + threads - 1) / threads;
      for (int t = 0; t < threads; ++t) {
        const std::size_t lo = std::min(frontier.size(), chunk * t);
        const std::size_t hi = std::min(frontier.size(), lo + chunk);
        pool.emplace_back([&, t, lo, hi] {
          expand_range_atomic(std::span(frontier).subspan(lo, hi - lo), actions, dm.dist_, level,
                              parts[static_cast<std::size_t>(t)]);
        });
      }
      for (auto& th : pool) th.join();
      for (auto& part : parts) next.insert(next.end(), part.begin(), part.end());
      std::ranges::sort(next);
    }
    if (!next.empty()) dm.max_distance_ = level;
    dm.reached_ += next.size();
    frontier = std::move(next);
  }

  if (options.record_parents) {
    dm.parent_action_.assign(size, -1);
    for (std::size_t w = 0; w < size; ++w) {
      const std::uint32_t d = dm.dist_[w];
      if (d == 0 || d == DistanceMap::kUnreached) continue;
      for (std::size_t i = 0; i < actions.size(); ++i) {
        const std::uint64_t u = w ^ actions[i].eff_mask;
        if (dm.dist_[u] == d - 1 && actions[i].fires(u)) {
          dm.parent_action_[w] = static_cast<std::int32_t>(i);
          break;
        }
      }
    }
  }
  return dm;
}

Eccentricity eccentricity(const DistanceMap& dm) {
  Eccentricity out;
  out.value = dm.max_distance();
  const auto dist = dm.distances();
  for (std::size_t s = 0; s < dist.size(); ++s) {
    if (dist[s] == out.value) out.farthest.emplace_back(dm.n(), s);
  }
  return out;
}

Eccentricity eccentricity(const Instance& p, const State& start, const SearchOptions& options) {
  SearchOptions opts = options;
  opts.record_parents = false;
  return eccentricity(bfs_from(p, start, opts));
}

Plan extract_shortest_plan(const DistanceMap& dm, const State& goal) {
  if (!dm.reached(goal)) {
    throw Unreachable(goal.to_string() + " is not reachable from " + dm.start().to_string());
  }
  Plan plan;
  plan.steps.resize(dm.distance(goal));
  State cur = goal;
  for (std::size_t i = plan.steps.size(); i-- > 0;) {
    plan.steps[i] = *dm.parent_action(cur);
    cur = *dm.parent_state(cur);
  }
  return plan;
}

Plan extract_shortest_plan(const Instance& p, const State& start, const State& goal,
                           const SearchOptions& options) {
  SearchOptions opts = options;
  opts.record_parents = true;
  return extract_shortest_plan(bfs_from(p, start, opts), goal);
}

// ---------------------------------------------------------------------------
// Exhaustive maximum over action subsets.

namespace {

// For n <= 3 every state has at most 8 successors, so the successor sets of
// all states pack into one word: byte u holds the successor mask of state u.
// Subset bits are split into bytes; per byte value the packed successor
// words are precomputed and OR-ed together per subset.
class PackedEnumerator {
 public:
  explicit PackedEnumerator(int n) : n_(n), actions_(enumerate_all_actions(n)) {
    groups_ = (actions_.size() + 7) / 8;
    tables_.assign(groups_, std::array<std::uint64_t, 256>{});
    for (std::size_t g = 0; g < groups_; ++g) {
      for (unsigned byte = 0; byte < 256; ++byte) {
        std::uint64_t word = 0;
        for (unsigned bit = 0; bit < 8; ++bit) {
          const std::size_t i = g * 8 + bit;
          if (!((byte >> bit) & 1U) || i >= actions_.size()) continue;
          const CompiledAction a(actions_[i]);
          for (std::uint64_t u = 0; u < (std::uint64_t{1} << n); ++u) {
            if (a.fires(u)) word |= std::uint64_t{1} << (8 * u + (u ^ a.eff_mask));
          }
        }
        tables_[g][byte] = word;
      }
    }
  }

  std::uint64_t subset_count() const { return std::uint64_t{1} << actions_.size(); }
  const std::vector<Action>& actions() const { return actions_; }

  std::uint32_t eccentricity(std::uint64_t mask) const {
    std::uint64_t succ = 0;
    for (std::size_t g = 0; g < groups_; ++g) succ |= tables_[g][(mask >> (8 * g)) & 0xFFU];
    std::uint32_t reached = 1;
    std::uint32_t frontier = 1;
    std::uint32_t level = 0;
    while (true) {
      std::uint32_t next = 0;
      for (std::uint32_t f = frontier; f != 0; f &= f - 1) {
        const int u = __builtin_ctz(f);
        next |= static_cast<std::uint32_t>((succ >> (8 * u)) & 0xFFU);
      }
      next &= ~reached;
      if (next == 0) return level;
      reached |= next;
      frontier = next;
      ++level;
    }
  }

 private:
  int n_;
  std::vector<Action> actions_;
  std::size_t groups_ = 0;
  std::vector<std::array<std::uint64_t, 256>> tables_;
};

struct Partial {
  std::uint32_t value = 0;
  std::uint64_t mask = 0;
  std::vector<std::uint64_t> histogram;
};

Instance subset_instance(int n, const std::vector<Action>& all, std::uint64_t mask) {
  std::vector<std::pair<Literal, Literal>> chosen;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if ((mask >> i) & 1U) chosen.emplace_back(all[i].pre, all[i].eff);
  }
  return make_instance(n, chosen, State::zeros(n));
}

}  // namespace

ExhaustiveResult exhaustive_max(int n, const ExhaustiveOptions& options) {
  if (n < 2) throw InvalidArgument("exhaustive_max requires n >= 2");
  ExhaustiveResult result;
  result.n = n;

  if (n <= 3 && !options.samples) {
    const PackedEnumerator en(n);
    const std::uint64_t total = en.subset_count();
    const int threads = std::max(1, options.threads);
    std::vector<Partial> parts(static_cast<std::size_t>(threads));
    auto work = [&](int t) {
      Partial& part = parts[static_cast<std::size_t>(t)];
      part.histogram.assign((std::size_t{1} << n), 0);
      const std::uint64_t lo = total / threads * t;
      const std::uint64_t hi = t + 1 == threads ? total : total / threads * (t + 1);
      for (std::uint64_t mask = lo; mask < hi; ++mask) {
        const std::uint32_t e = en.eccentricity(mask);
        ++part.histogram[e];
        if (e > part.value) {
          part.value = e;
          part.mask = mask;
        }
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
      for (auto& th : pool) th.join();
    }
    result.histogram.assign(std::size_t{1} << n, 0);
    bool first = true;
    for (const Partial& part : parts) {
      for (std::size_t e = 0; e < part.histogram.size(); ++e) result.histogram[e] += part.histogram[e];
      if (first || part.value > result.value ||
          (part.value == result.value && part.mask < result.witness_mask)) {
        result.value = part.value;
        result.witness_mask = part.mask;
        first = false;
      }
    }
    while (!result.histogram.empty() && result.histogram.back() == 0) result.histogram.pop_back();
    result.subsets_evaluated = total;
    result.exhaustive = true;
    result.witness = subset_instance(n, en.actions(), result.witness_mask);
    return result;
  }

  if (!options.samples) {
    throw InvalidArgument("exhaustive_max needs a sample count for n > 3");
  }
  if (*options.samples > options.budget) {
    throw BudgetExceeded(fmt::format("{} samples exceed the budget of {}", *options.samples,
                                     options.budget));
  }
  const auto all = enumerate_all_actions(n);
  if (all.size() > 64) throw InvalidArgument("sampling mode supports at most 64 candidate actions");
  Rng rng(options.seed);
  SearchOptions search;
  search.record_parents = false;
  bool first = true;
  for (std::uint64_t i = 0; i < *options.samples; ++i) {
    // Density varies per sample so sparse and dense subsets are both visited.
    const std::uint64_t density = 1 + rng.below(15);
    std::uint64_t mask = 0;
    for (std::size_t b = 0; b < all.size(); ++b) {
      if (rng.below(16) < density) mask |= std::uint64_t{1} << b;
    }
    const std::uint32_t e = eccentricity(subset_instance(n, all, mask), State::zeros(n), search).value;
    if (first || e > result.value || (e == result.value && mask < result.witness_mask)) {
      result.value = e;
      result.witness_mask = mask;
      first = false;
    }
  }
  result.subsets_evaluated = *options.samples;
  result.witness = subset_instance(n, all, result.witness_mask);
  return result;
}

// ---------------------------------------------------------------------------

std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("Rng::below(0)");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % bound;
}

Instance random_instance(int n, std::uint64_t seed, bool force_good) {
  const auto all = enumerate_all_actions(n);
  Rng rng(seed * 0x2545F4914F6CDD1DULL + static_cast<std::uint64_t>(n));
  const auto count = static_cast<std::size_t>(
      std::min<std::int64_t>(rng.between(n, 3 * n), static_cast<std::int64_t>(all.size())));

  std::vector<int> chosen;
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<int> pool(all.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<int>(i);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
    std::ranges::sort(chosen);
    if (!force_good) break;
    std::vector<std::pair<Literal, Literal>> pairs;
    for (int i : chosen) pairs.emplace_back(all[i].pre, all[i].eff);
    if (is_good(make_instance(n, pairs, State::zeros(n)))) break;
  }

  auto has = [&chosen](int idx) { return std::ranges::binary_search(chosen, idx); };
  auto add = [&](Literal pre, Literal eff) {
    const int idx = canonical_index(Action{pre, eff, 0}, n);
    if (!has(idx)) {
      chosen.insert(std::ranges::upper_bound(chosen, idx), idx);
    }
  };
  auto random_pre = [&](int v) {
    int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
    if (u >= v) ++u;
    return Literal{u, rng.below(2) == 0};
  };

  if (force_good) {
    for (int v = 0; v < n; ++v) {
      std::vector<Literal> up;
      std::vector<Literal> down;
      for (int i : chosen) {
        if (all[i].eff == Literal::pos(v)) up.push_back(all[i].pre);
        if (all[i].eff == Literal::neg(v)) down.push_back(all[i].pre);
      }
      if (up.empty()) {
        up.push_back(random_pre(v));
        add(up.back(), Literal::pos(v));
      }
      if (down.empty()) {
        down.push_back(random_pre(v));
        add(down.back(), Literal::neg(v));
      }
      const bool ok = std::ranges::any_of(up, [&](Literal a) {
        return std::ranges::any_of(down, [&](Literal b) { return a != negate(b); });
      });
      // The up achiever's own precondition is never its negation.
      if (!ok) add(up.front(), Literal::neg(v));
    }
  }

  std::vector<std::pair<Literal, Literal>> pairs;
  for (int i : chosen) pairs.emplace_back(all[i].pre, all[i].eff);
  return make_instance(n, pairs, State::zeros(n));
}

}  // namespace strips11
