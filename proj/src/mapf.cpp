#include "strips11/mapf.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include <fmt/core.h>

#include "strips11/search.hpp"

namespace strips11 {

MapfProblem compile_mapf(const Instance& p) {
  p.check();
  if (!p.goal) throw MissingGoal("MAPF compilation needs a goal state");
  if (!p.canonical()) throw InvalidArgument("compilation requires a canonical instance");
  MapfProblem m;
  m.agents = p.n;
  for (int v = 0; v < p.n; ++v) {
    m.start.push_back(Literal{v, p.init.get(v)}.node(p.n));
    m.goal.push_back(Literal{v, p.goal->get(v)}.node(p.n));
  }
  for (const Action& a : p.actions) {
    m.moves.push_back({a.id, a.eff.var, negate(a.eff).node(p.n), a.eff.node(p.n), a.pre.node(p.n)});
  }
  return m;
}

namespace {

bool occupied(const Schedule& s, const MapfProblem& m, int node, int t) {
  return s.positions[static_cast<std::size_t>(m.owner(node))][static_cast<std::size_t>(t)] == node;
}

}  // namespace

ScheduleCheck validate_schedule(const MapfProblem& m, const Schedule& s) {
  auto fail = [](std::string why) { return ScheduleCheck{false, std::move(why)}; };
  if (static_cast<int>(s.positions.size()) != m.agents) return fail("one path per agent required");
  const std::size_t width = s.positions.empty() ? 1 : s.positions.front().size();
  if (width == 0) return fail("paths must contain the start position");
  const bool has_moves = !s.moves.empty();
  if (has_moves && static_cast<int>(s.moves.size()) != m.agents) return fail("one move list per agent required");
  for (int a = 0; a < m.agents; ++a) {
    const auto& path = s.positions[static_cast<std::size_t>(a)];
    if (path.size() != width) return fail(fmt::format("agent {} path has a different length", a));
    if (has_moves && s.moves[static_cast<std::size_t>(a)].size() + 1 != width) {
      return fail(fmt::format("agent {} move list has the wrong length", a));
    }
    for (int node : path) {
      if (node < 0 || node >= m.node_count() || m.owner(node) != a) {
        return fail(fmt::format("agent {} visits node {} outside its pair", a, node));
      }
    }
    if (path.front() != m.start[static_cast<std::size_t>(a)]) return fail(fmt::format("agent {} does not start at its start node", a));
    if (path.back() != m.goal[static_cast<std::size_t>(a)]) return fail(fmt::format("agent {} does not end at its goal node", a));
  }
  for (std::size_t t = 0; t + 1 < width; ++t) {
    for (int a = 0; a < m.agents; ++a) {
      const int from = s.positions[static_cast<std::size_t>(a)][t];
      const int to = s.positions[static_cast<std::size_t>(a)][t + 1];
      const int claimed = has_moves ? s.moves[static_cast<std::size_t>(a)][t] : -1;
      if (from == to) {
        if (claimed >= 0) return fail(fmt::format("agent {} claims move {} while waiting at t={}", a, claimed, t));
        continue;
      }
      bool supported = false;
      bool exists = false;
      for (const MapfMove& mv : m.moves) {
        if (mv.agent != a || mv.from != from || mv.to != to) continue;
        if (claimed >= 0 && mv.id != claimed) continue;
        exists = true;
        if (occupied(s, m, mv.support, static_cast<int>(t))) {
          supported = true;
          break;
        }
      }
      if (!exists) return fail(fmt::format("agent {} has no move {} -> {} at t={}", a, from, to, t));
      if (!supported) {
        return fail(fmt::format("agent {} moves {} -> {} at t={} without support", a, from, to, t));
      }
    }
  }
  return {true, {}};
}

// ---------------------------------------------------------------------------
// Conflict-based search.

namespace {

struct Constraint {
  int agent = 0;
  int t = 0;
  int node = -1;  // agent is not at node at time t

  friend auto operator<=>(const Constraint&, const Constraint&) = default;
};

struct AgentPath {
  std::vector<int> pos;
  std::vector<int> move;
};

struct CtNode {
  std::vector<Constraint> constraints;  // sorted
  std::vector<AgentPath> paths;
  std::size_t conflicts = 0;
  std::size_t order = 0;
};

// A move at t whose support node is not occupied by its owner.
struct Conflict {
  int t;
  int supporter;
  int support;
};

class Cbs {
 public:
  Cbs(const MapfProblem& m, int makespan) : m_(m), makespan_(makespan) {
    by_agent_.resize(static_cast<std::size_t>(m.agents));
    for (const MapfMove& mv : m.moves) by_agent_[static_cast<std::size_t>(mv.agent)].push_back(mv);
  }

  // Lexicographic (support conflicts, moves) over the agent's path given
  // everyone else's current paths; deterministic ties: wait, then lowest id.
  std::optional<AgentPath> plan_agent(int agent, const std::vector<Constraint>& constraints,
                                      const std::vector<AgentPath>& others) const {
    using Cost = std::pair<std::size_t, std::size_t>;
    constexpr Cost kInf{std::numeric_limits<std::size_t>::max(), 0};
    const int T = makespan_;
    const int lo = agent;
    const int hi = agent + m_.agents;
    auto local = [&](int node) { return node == lo ? 0 : 1; };
    auto node_of = [&](int k) { return k == 0 ? lo : hi; };

    auto forbidden_at = [&](int node, int t) {
      return std::ranges::any_of(constraints, [&](const Constraint& c) {
        return c.agent == agent && c.t == t && c.node == node;
      });
    };
    // Some constraint keeps the support's owner off it at t.
    auto support_ruled_out = [&](int node, int t) {
      const int owner = m_.owner(node);
      return std::ranges::any_of(constraints, [&](const Constraint& c) {
        return c.agent == owner && c.t == t && c.node == node;
      });
    };
    auto occupied_by_others = [&](int node, int t) {
      const int owner = m_.owner(node);
      return owner != agent && others[static_cast<std::size_t>(owner)].pos[static_cast<std::size_t>(t)] == node;
    };
    // Other agents' moves at t that need this agent at the node other than `node`.
    auto starved = [&](int node, int t) {
      if (t >= T) return std::size_t{0};
      std::size_t count = 0;
      for (int b = 0; b < m_.agents; ++b) {
        if (b == agent) continue;
        const int mv = others[static_cast<std::size_t>(b)].move[static_cast<std::size_t>(t)];
        if (mv < 0) continue;
        const int support = move_by_id(mv).support;
        if (m_.owner(support) == agent && support != node) ++count;
      }
      return count;
    };

    // best[t][k]: cheapest cost to be at node_of(k) at time t.
    std::vector<std::array<Cost, 2>> best(static_cast<std::size_t>(T) + 1, {kInf, kInf});
    std::vector<std::array<int, 2>> via(static_cast<std::size_t>(T) + 1, {-2, -2});
    const int start = m_.start[static_cast<std::size_t>(agent)];
    if (forbidden_at(start, 0)) return std::nullopt;
    best[0][static_cast<std::size_t>(local(start))] = {starved(start, 0), 0};
    via[0][static_cast<std::size_t>(local(start))] = -1;
    for (int t = 0; t < T; ++t) {
      for (int k = 0; k < 2; ++k) {
        const Cost cur = best[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)];
        if (cur == kInf) continue;
        const int here = node_of(k);
        // wait
        if (!forbidden_at(here, t + 1)) {
          const Cost c{cur.first + starved(here, t + 1), cur.second};
          auto& slot = best[static_cast<std::size_t>(t) + 1][static_cast<std::size_t>(k)];
          if (c < slot) {
            slot = c;
            via[static_cast<std::size_t>(t) + 1][static_cast<std::size_t>(k)] = -1;
          }
        }
        // move
        const int there = node_of(1 - k);
        if (forbidden_at(there, t + 1)) continue;
        int chosen = -1;
        bool chosen_supported = false;
        for (const MapfMove& mv : by_agent_[static_cast<std::size_t>(agent)]) {
          if (mv.from != here || support_ruled_out(mv.support, t)) continue;
          const bool sup = occupied_by_others(mv.support, t);
          if (chosen < 0 || (sup && !chosen_supported)) {
            chosen = mv.id;
            chosen_supported = sup;
          }
        }
        if (chosen < 0) continue;
        const Cost c{cur.first + (chosen_supported ? 0 : 1) + starved(there, t + 1), cur.second + 1};
        auto& slot = best[static_cast<std::size_t>(t) + 1][static_cast<std::size_t>(1 - k)];
        if (c < slot) {
          slot = c;
          via[static_cast<std::size_t>(t) + 1][static_cast<std::size_t>(1 - k)] = chosen;
        }
      }
    }
    const int goal = m_.goal[static_cast<std::size_t>(agent)];
    int k = local(goal);
    if (best[static_cast<std::size_t>(T)][static_cast<std::size_t>(k)] == kInf) return std::nullopt;
    AgentPath path;
    path.pos.assign(static_cast<std::size_t>(T) + 1, 0);
    path.move.assign(static_cast<std::size_t>(T), -1);
    for (int t = T; t >= 0; --t) {
      path.pos[static_cast<std::size_t>(t)] = node_of(k);
      if (t == 0) break;
      const int mv = via[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)];
      path.move[static_cast<std::size_t>(t) - 1] = mv;
      if (mv >= 0) k = 1 - k;
    }
    return path;
  }

  std::vector<Conflict> all_conflicts(const std::vector<AgentPath>& paths) const {
    std::vector<Conflict> out;
    for (int t = 0; t < makespan_; ++t) {
      for (int a = 0; a < m_.agents; ++a) {
        const int mv = paths[static_cast<std::size_t>(a)].move[static_cast<std::size_t>(t)];
        if (mv < 0) continue;
        const MapfMove& move = move_by_id(mv);
        const int b = m_.owner(move.support);
        if (paths[static_cast<std::size_t>(b)].pos[static_cast<std::size_t>(t)] == move.support) continue;
        out.push_back(Conflict{t, b, move.support});
      }
    }
    return out;
  }

  // Replans the constrained agent and, when c removes it from a node, every
  // agent whose path leans on that node at c.t.
  bool replan(CtNode& child, const Constraint& c) const {
    std::vector<int> agents{c.agent};
    for (int a = 0; a < m_.agents; ++a) {
      const int mv = child.paths[static_cast<std::size_t>(a)].move[static_cast<std::size_t>(c.t)];
      if (a != c.agent && mv >= 0 && move_by_id(mv).support == c.node) agents.push_back(a);
    }
    for (int a : agents) {
      auto path = plan_agent(a, child.constraints, child.paths);
      if (!path) return false;
      child.paths[static_cast<std::size_t>(a)] = std::move(*path);
    }
    return true;
  }

  std::optional<Schedule> run(std::size_t budget, CbsStats& stats) {
    auto cmp = [](const CtNode& x, const CtNode& y) {
      if (x.conflicts != y.conflicts) return x.conflicts > y.conflicts;
      if (x.constraints.size() != y.constraints.size()) return x.constraints.size() > y.constraints.size();
      return x.order > y.order;
    };
    std::priority_queue<CtNode, std::vector<CtNode>, decltype(cmp)> open(cmp);
    std::set<std::vector<Constraint>> seen;
    std::size_t order = 0;
    std::size_t expanded = 0;

    CtNode root;
    root.paths.resize(static_cast<std::size_t>(m_.agents));
    for (int a = 0; a < m_.agents; ++a) {
      root.paths[static_cast<std::size_t>(a)] = idle_path(a);
    }
    for (int a = 0; a < m_.agents; ++a) {
      auto path = plan_agent(a, root.constraints, root.paths);
      if (!path) return std::nullopt;
      root.paths[static_cast<std::size_t>(a)] = std::move(*path);
    }
    root.conflicts = all_conflicts(root.paths).size();
    root.order = order++;
    seen.insert(root.constraints);
    open.push(std::move(root));
    ++stats.generated;

    while (!open.empty()) {
      CtNode node = open.top();
      open.pop();
      ++stats.expanded;
      ++expanded;
      const std::vector<Conflict> conflicts = all_conflicts(node.paths);
      if (conflicts.empty()) return to_schedule(node.paths);
      if (expanded > budget) {
        throw BudgetExhausted(fmt::format("search budget of {} nodes exhausted at makespan {}", budget, makespan_));
      }
      const Conflict& conflict = conflicts.front();
      const int other = conflict.support == conflict.supporter ? conflict.supporter + m_.agents
                                                               : conflict.supporter;
      // Disjoint split on the supporter's position at t. Off the support,
      // every move relying on it at t becomes unusable.
      const Constraint branches[2] = {
          Constraint{conflict.supporter, conflict.t, other},
          Constraint{conflict.supporter, conflict.t, conflict.support},
      };
      for (const Constraint& c : branches) {
        CtNode child;
        child.constraints = node.constraints;
        child.constraints.insert(std::ranges::upper_bound(child.constraints, c), c);
        if (!seen.insert(child.constraints).second) continue;
        child.paths = node.paths;
        if (!replan(child, c)) continue;
        child.conflicts = all_conflicts(child.paths).size();
        child.order = order++;
        open.push(std::move(child));
        ++stats.generated;
      }
    }
    return std::nullopt;
  }

 private:
  const MapfMove& move_by_id(int id) const {
    const MapfMove& mv = m_.moves[static_cast<std::size_t>(id)];
    if (mv.id == id) return mv;
    for (const MapfMove& other : m_.moves) {
      if (other.id == id) return other;
    }
    throw InvalidArgument(fmt::format("unknown move {}", id));
  }

  AgentPath idle_path(int agent) const {
    AgentPath p;
    p.pos.assign(static_cast<std::size_t>(makespan_) + 1, m_.start[static_cast<std::size_t>(agent)]);
    p.move.assign(static_cast<std::size_t>(makespan_), -1);
    return p;
  }

  Schedule to_schedule(const std::vector<AgentPath>& paths) const {
    Schedule s;
    for (const auto& p : paths) {
      s.positions.push_back(p.pos);
      s.moves.push_back(p.move);
    }
    return s;
  }

  const MapfProblem& m_;
  int makespan_;
  std::vector<std::vector<MapfMove>> by_agent_;
};

}  // namespace

std::optional<int> makespan_lower_bound(const MapfProblem& m, int horizon) {
  const int nodes = m.node_count();
  const auto N = static_cast<std::size_t>(nodes);
  // pair[x * N + y]: x and y may be occupied at the same time. Nodes of one
  // agent only pair with themselves.
  std::vector<char> pair(N * N, 0);
  for (int x : m.start) {
    for (int y : m.start) pair[static_cast<std::size_t>(x) * N + static_cast<std::size_t>(y)] = 1;
  }
  auto together = [&](std::initializer_list<int> xs) {
    for (int a : xs) {
      for (int b : xs) {
        if (!pair[static_cast<std::size_t>(a) * N + static_cast<std::size_t>(b)]) return false;
      }
    }
    return true;
  };
  // Per node: (next node, support), support -1 for a wait.
  std::vector<std::vector<std::pair<int, int>>> options(N);
  for (int x = 0; x < nodes; ++x) options[static_cast<std::size_t>(x)].emplace_back(x, -1);
  for (const MapfMove& mv : m.moves) options[static_cast<std::size_t>(mv.from)].emplace_back(mv.to, mv.support);

  for (int t = 0; t <= horizon; ++t) {
    bool goal = true;
    for (int x : m.goal) {
      for (int y : m.goal) goal = goal && pair[static_cast<std::size_t>(x) * N + static_cast<std::size_t>(y)];
    }
    if (goal) return t;
    std::vector<char> next(N * N, 0);
    for (int x = 0; x < nodes; ++x) {
      for (int y = 0; y < nodes; ++y) {
        if (!pair[static_cast<std::size_t>(x) * N + static_cast<std::size_t>(y)]) continue;
        for (const auto& [x2, sx] : options[static_cast<std::size_t>(x)]) {
          if (sx >= 0 && !together({x, y, sx})) continue;
          if (x == y) {
            next[static_cast<std::size_t>(x2) * N + static_cast<std::size_t>(x2)] = 1;
            continue;
          }
          for (const auto& [y2, sy] : options[static_cast<std::size_t>(y)]) {
            if (sy >= 0 && !(sx >= 0 ? together({x, y, sx, sy}) : together({x, y, sy}))) continue;
            next[static_cast<std::size_t>(x2) * N + static_cast<std::size_t>(y2)] = 1;
          }
        }
      }
    }
    if (next == pair) return std::nullopt;
    pair = std::move(next);
  }
  return std::nullopt;
}

Schedule cbs_solve(const MapfProblem& m, int horizon, const CbsOptions& options, CbsStats* stats) {
  if (horizon < 0) throw InvalidArgument("horizon must be non-negative");
  for (std::size_t i = 0; i < m.moves.size(); ++i) {
    if (m.owner(m.moves[i].support) == m.moves[i].agent) {
      throw InvalidArgument("agent would support its own move");
    }
  }
  CbsStats local;
  CbsStats& st = stats ? *stats : local;
  const auto lower = makespan_lower_bound(m, horizon);
  if (!lower) throw Unsolvable(fmt::format("no schedule with makespan <= {}", horizon));
  for (int makespan = *lower; makespan <= horizon; ++makespan) {
    Cbs cbs(m, makespan);
    if (auto s = cbs.run(options.node_budget, st)) return *s;
  }
  throw Unsolvable(fmt::format("no schedule with makespan <= {}", horizon));
}

Schedule schedule_from_plan(const MapfProblem& m, const Instance& p, const Plan& plan) {
  const Trace trace = validate_plan(p, plan);
  Schedule s;
  s.positions.assign(static_cast<std::size_t>(m.agents), {});
  s.moves.assign(static_cast<std::size_t>(m.agents), std::vector<int>(plan.steps.size(), -1));
  for (const State& st : trace.states) {
    for (int v = 0; v < m.agents; ++v) {
      s.positions[static_cast<std::size_t>(v)].push_back(Literal{v, st.get(v)}.node(m.agents));
    }
  }
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const Action& a = p.actions[static_cast<std::size_t>(plan.steps[i])];
    // Steps that re-assert a true effect leave the agent in place.
    if (trace.states[i] != trace.states[i + 1]) {
      s.moves[static_cast<std::size_t>(a.eff.var)][i] = a.id;
    }
  }
  return s;
}

std::optional<Plan> serialize_schedule(const MapfProblem& m, const Schedule& s) {
  const auto check = validate_schedule(m, s);
  if (!check.ok) throw InvalidArgument("cannot serialize an invalid schedule: " + check.violation);
  Plan plan;
  for (int t = 0; t < s.makespan(); ++t) {
    std::vector<int> movers;
    std::vector<int> move_of(static_cast<std::size_t>(m.agents), -1);
    for (int a = 0; a < m.agents; ++a) {
      const int from = s.positions[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)];
      const int to = s.positions[static_cast<std::size_t>(a)][static_cast<std::size_t>(t) + 1];
      if (from == to) continue;
      int chosen = s.moves.empty() ? -1 : s.moves[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)];
      if (chosen < 0) {
        for (const MapfMove& mv : m.moves) {
          if (mv.agent == a && mv.from == from && mv.to == to && occupied(s, m, mv.support, t)) {
            chosen = mv.id;
            break;
          }
        }
      }
      movers.push_back(a);
      move_of[static_cast<std::size_t>(a)] = chosen;
    }
    // a must run before b when b vacates the support of a's move.
    std::vector<std::vector<int>> after(static_cast<std::size_t>(m.agents));
    std::vector<int> indegree(static_cast<std::size_t>(m.agents), 0);
    for (int a : movers) {
      int sup = -1;
      for (const MapfMove& mv : m.moves) {
        if (mv.id == move_of[static_cast<std::size_t>(a)]) sup = mv.support;
      }
      const int b = m.owner(sup);
      if (b != a && move_of[static_cast<std::size_t>(b)] >= 0) {
        after[static_cast<std::size_t>(a)].push_back(b);
        ++indegree[static_cast<std::size_t>(b)];
      }
    }
    std::set<int> ready;
    for (int a : movers) {
      if (indegree[static_cast<std::size_t>(a)] == 0) ready.insert(a);
    }
    std::size_t emitted = 0;
    while (!ready.empty()) {
      const int a = *ready.begin();
      ready.erase(ready.begin());
      plan.steps.push_back(move_of[static_cast<std::size_t>(a)]);
      ++emitted;
      for (int b : after[static_cast<std::size_t>(a)]) {
        if (--indegree[static_cast<std::size_t>(b)] == 0) ready.insert(b);
      }
    }
    if (emitted != movers.size()) return std::nullopt;
  }
  return plan;
}

Schedule parse_agent_listing(std::string_view text) {
  Schedule s;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto colon = line.find(':');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (colon == std::string::npos || line.find("Agent") == std::string::npos) {
      throw InvalidArgument(fmt::format("line {}: expected 'Agent <k>: ...'", line_no));
    }
    int agent = -1;
    if (std::sscanf(line.c_str() + line.find("Agent") + 5, "%d", &agent) != 1 ||
        agent != static_cast<int>(s.positions.size())) {
      throw InvalidArgument(fmt::format("line {}: agents must be listed in order from 0", line_no));
    }
    std::istringstream tokens(line.substr(colon + 1));
    std::string tok;
    std::vector<int> path;
    while (tokens >> tok) {
      std::size_t used = 0;
      try {
        path.push_back(std::stoi(tok, &used));
      } catch (const std::exception&) {
        throw InvalidArgument(fmt::format("line {}: bad position '{}'", line_no, tok));
      }
    }
    s.positions.push_back(std::move(path));
  }
  return s;
}

nlohmann::json mapf_to_json(const MapfProblem& m) {
  nlohmann::json j;
  j["agents"] = m.agents;
  j["start"] = m.start;
  j["goal"] = m.goal;
  auto& moves = j["moves"] = nlohmann::json::array();
  for (const MapfMove& mv : m.moves) {
    moves.push_back({{"id", mv.id}, {"agent", mv.agent}, {"from", mv.from}, {"to", mv.to}, {"support", mv.support}});
  }
  return j;
}

MapfProblem mapf_from_json(const nlohmann::json& j) {
  MapfProblem m;
  try {
    m.agents = j.at("agents").get<int>();
    m.start = j.at("start").get<std::vector<int>>();
    m.goal = j.at("goal").get<std::vector<int>>();
    for (const auto& mv : j.at("moves")) {
      m.moves.push_back({mv.at("id").get<int>(), mv.at("agent").get<int>(), mv.at("from").get<int>(),
                         mv.at("to").get<int>(), mv.at("support").get<int>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed MAPF JSON: ") + e.what());
  }
  if (m.agents <= 0 || static_cast<int>(m.start.size()) != m.agents || static_cast<int>(m.goal.size()) != m.agents) {
    throw InvalidArgument("MAPF JSON needs one start and goal per agent");
  }
  for (std::size_t i = 0; i < m.moves.size(); ++i) {
    const MapfMove& mv = m.moves[i];
    const int nodes = m.node_count();
    if (mv.id != static_cast<int>(i) || mv.from < 0 || mv.from >= nodes || mv.to < 0 || mv.to >= nodes ||
        mv.support < 0 || mv.support >= nodes || m.owner(mv.from) != mv.agent || m.owner(mv.to) != mv.agent) {
      throw InvalidArgument(fmt::format("MAPF move {} is malformed", i));
    }
  }
  return m;
}

nlohmann::json schedule_to_json(const Schedule& s) {
  nlohmann::json j;
  j["makespan"] = s.makespan();
  j["positions"] = s.positions;
  if (!s.moves.empty()) j["moves"] = s.moves;
  return j;
}

Schedule schedule_from_json(const nlohmann::json& j) {
  Schedule s;
  try {
    s.positions = j.at("positions").get<std::vector<std::vector<int>>>();
    if (j.contains("moves")) s.moves = j.at("moves").get<std::vector<std::vector<int>>>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed schedule JSON: ") + e.what());
  }
  return s;
}

}  // namespace strips11
