#include "strips11/petri.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include <fmt/core.h>

#include "strips11/search.hpp"

namespace strips11 {

namespace {

PetriNet build_net(const Instance& p) {
  p.check();
  if (!p.canonical()) throw InvalidArgument("compilation requires a canonical instance");
  PetriNet net;
  for (int node = 0; node < 2 * p.n; ++node) {
    net.places.push_back(Literal::from_node(node, p.n).to_string());
  }
  for (const Action& a : p.actions) {
    PetriNet::Transition t;
    t.name = fmt::format("t{}", a.id);
    t.action = a.id;
    t.input = {a.pre.node(p.n), negate(a.eff).node(p.n)};
    t.output = {a.pre.node(p.n), a.eff.node(p.n)};
    net.transitions.push_back(std::move(t));
  }
  return net;
}

void check_marking(const PetriNet& net, const Marking& m) {
  if (m.tokens.size() != net.places.size()) {
    throw InvalidArgument("marking size differs from the number of places");
  }
}

void check_transition(const PetriNet& net, int t) {
  if (t < 0 || t >= static_cast<int>(net.transitions.size())) {
    throw InvalidArgument(fmt::format("no transition {}", t));
  }
}

// Visits reachable markings breadth first. `visit(marking, depth)` returns
// false to stop early.
template <typename Visit>
void explore(const PetriNet& net, const Marking& initial, std::size_t limit, Visit&& visit) {
  check_marking(net, initial);
  std::map<Marking, std::uint32_t> seen{{initial, 0}};
  std::deque<const Marking*> queue{&seen.begin()->first};
  if (!visit(initial, 0U)) return;
  while (!queue.empty()) {
    const Marking& m = *queue.front();
    queue.pop_front();
    const std::uint32_t depth = seen.at(m);
    for (int t = 0; t < static_cast<int>(net.transitions.size()); ++t) {
      if (!enabled(net, m, t)) continue;
      Marking next = fire(net, m, t);
      auto [it, inserted] = seen.emplace(std::move(next), depth + 1);
      if (!inserted) continue;
      if (!visit(it->first, depth + 1)) return;
      if (seen.size() > limit) {
        throw CapExceeded(fmt::format("more than {} reachable markings", limit));
      }
      queue.push_back(&it->first);
    }
  }
}

}  // namespace

std::uint64_t Marking::total() const {
  return std::accumulate(tokens.begin(), tokens.end(), std::uint64_t{0});
}

Marking marking_of(const State& s) {
  const int n = s.width();
  Marking m;
  m.tokens.assign(static_cast<std::size_t>(2 * n), 0);
  for (int v = 0; v < n; ++v) m.tokens[static_cast<std::size_t>(Literal{v, s.get(v)}.node(n))] = 1;
  return m;
}

std::optional<State> state_of(const Marking& m, int n) {
  if (m.tokens.size() != static_cast<std::size_t>(2 * n)) return std::nullopt;
  std::uint64_t bits = 0;
  for (int v = 0; v < n; ++v) {
    const auto neg = m.tokens[static_cast<std::size_t>(v)];
    const auto pos = m.tokens[static_cast<std::size_t>(n + v)];
    if (neg + pos != 1) return std::nullopt;
    if (pos == 1) bits |= std::uint64_t{1} << v;
  }
  return State(n, bits);
}

CompiledPetri compile_petri(const Instance& p) {
  if (!p.goal) throw MissingGoal("Petri compilation needs a goal state");
  CompiledPetri out;
  out.net = build_net(p);
  out.initial = marking_of(p.init);
  out.goal = marking_of(*p.goal);
  return out;
}

bool enabled(const PetriNet& net, const Marking& m, int t) {
  check_transition(net, t);
  check_marking(net, m);
  const auto& input = net.transitions[static_cast<std::size_t>(t)].input;
  for (int place : input) {
    const auto need = static_cast<std::uint32_t>(std::ranges::count(input, place));
    if (m.tokens[static_cast<std::size_t>(place)] < need) return false;
  }
  return true;
}

Marking fire(const PetriNet& net, const Marking& m, int t) {
  if (!enabled(net, m, t)) throw NotEnabled(fmt::format("transition {} is not enabled", t));
  Marking out = m;
  const auto& tr = net.transitions[static_cast<std::size_t>(t)];
  for (int place : tr.input) --out.tokens[static_cast<std::size_t>(place)];
  for (int place : tr.output) ++out.tokens[static_cast<std::size_t>(place)];
  return out;
}

std::map<Marking, std::uint32_t> petri_reach(const PetriNet& net, const Marking& initial,
                                             std::size_t limit) {
  std::map<Marking, std::uint32_t> out;
  explore(net, initial, limit, [&](const Marking& m, std::uint32_t depth) {
    if (std::ranges::any_of(m.tokens, [](std::uint32_t k) { return k > 1; })) {
      throw SafetyViolation("reachable marking puts more than one token on a place");
    }
    out.emplace(m, depth);
    return true;
  });
  return out;
}

bool check_safe(const PetriNet& net, const Marking& initial, std::size_t limit) {
  bool safe = true;
  explore(net, initial, limit, [&](const Marking& m, std::uint32_t) {
    safe = std::ranges::none_of(m.tokens, [](std::uint32_t k) { return k > 1; });
    return safe;
  });
  return safe;
}

bool check_conservative(const PetriNet& net, const Marking& initial, std::size_t limit) {
  const std::uint64_t total = initial.total();
  bool conservative = true;
  explore(net, initial, limit, [&](const Marking& m, std::uint32_t) {
    conservative = m.total() == total;
    return conservative;
  });
  return conservative;
}

CrossValidation cross_validate(const Instance& p) {
  if (p.n > 12) throw CapExceeded("cross_validate supports at most 12 variables");
  CrossValidation out;
  SearchOptions opts;
  opts.record_parents = false;
  const DistanceMap dm = bfs_from(p, p.init, opts);
  const PetriNet net = build_net(p);
  const auto reach = petri_reach(net, marking_of(p.init));

  out.depths = dm.max_distance() + 1;
  if (reach.size() != dm.reached_count()) {
    out.mismatch = fmt::format("{} reachable markings but {} reachable states", reach.size(),
                               dm.reached_count());
    return out;
  }
  for (const auto& [m, depth] : reach) {
    const auto s = state_of(m, p.n);
    if (!s) {
      out.mismatch = "reachable marking is not the image of a state";
      return out;
    }
    if (dm.distance(*s) != depth) {
      out.mismatch = fmt::format("state {} at distance {} but its marking at depth {}",
                                 s->to_string(), dm.distance(*s), depth);
      return out;
    }
  }
  out.ok = true;
  return out;
}

nlohmann::json petri_to_json(const PetriNet& net, const Marking& initial,
                             const std::optional<Marking>& goal) {
  nlohmann::json j;
  j["places"] = net.places;
  auto& ts = j["transitions"] = nlohmann::json::array();
  for (const auto& t : net.transitions) {
    ts.push_back({{"name", t.name}, {"action", t.action}, {"input", t.input}, {"output", t.output}});
  }
  j["initial"] = initial.tokens;
  if (goal) j["goal"] = goal->tokens;
  return j;
}

CompiledPetri petri_from_json(const nlohmann::json& j) {
  CompiledPetri out;
  try {
    out.net.places = j.at("places").get<std::vector<std::string>>();
    for (const auto& t : j.at("transitions")) {
      PetriNet::Transition tr;
      tr.name = t.value("name", fmt::format("t{}", out.net.transitions.size()));
      tr.action = t.value("action", -1);
      tr.input = t.at("input").get<std::vector<int>>();
      tr.output = t.at("output").get<std::vector<int>>();
      for (int place : tr.input) {
        if (place < 0 || place >= out.net.place_count()) throw InvalidArgument("input place out of range");
      }
      for (int place : tr.output) {
        if (place < 0 || place >= out.net.place_count()) throw InvalidArgument("output place out of range");
      }
      out.net.transitions.push_back(std::move(tr));
    }
    out.initial.tokens = j.at("initial").get<std::vector<std::uint32_t>>();
    if (j.contains("goal")) out.goal.tokens = j.at("goal").get<std::vector<std::uint32_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed Petri net JSON: ") + e.what());
  }
  check_marking(out.net, out.initial);
  return out;
}

}  // namespace strips11
