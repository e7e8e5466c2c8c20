#pragma once

// Cooperative directed MAPF compiled from an instance. Nodes are literals
// (Literal::node numbering), agent v lives on the two literal nodes of
// variable v, and action a becomes a move of agent eff(a).var from
// node(not eff) to node(eff) that needs node(pre) occupied.
//
// Semantics: time is discrete; every agent either waits or makes one move
// per step; the support node of a move from t to t+1 must be occupied at t.
// All supports of a step are evaluated against the positions at t, so
// several agents may move in the same step.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "strips11/core.hpp"

namespace strips11 {

struct MapfMove {
  int id = 0;  // action id
  int agent = 0;
  int from = 0;
  int to = 0;
  int support = 0;
};

struct MapfProblem {
  int agents = 0;
  std::vector<int> start;  // node per agent
  std::vector<int> goal;
  std::vector<MapfMove> moves;

  int node_count() const { return 2 * agents; }
  /// Agent whose node pair contains `node`.
  int owner(int node) const { return node % agents; }
};

MapfProblem compile_mapf(const Instance& p);

struct Schedule {
  /// positions[agent][t] for t in [0, makespan].
  std::vector<std::vector<int>> positions;
  /// moves[agent][t]: move id used from t to t+1, or -1 for a wait. May be
  /// empty when the schedule was read from positions only.
  std::vector<std::vector<int>> moves;

  int makespan() const {
    return positions.empty() ? 0 : static_cast<int>(positions.front().size()) - 1;
  }
};

struct ScheduleCheck {
  bool ok = false;
  std::string violation;
};

ScheduleCheck validate_schedule(const MapfProblem& m, const Schedule& s);

class Unsolvable : public Error {
 public:
  using Error::Error;
};

/// The constraint tree outgrew CbsOptions::node_budget before the search
/// could decide a makespan.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

struct CbsOptions {
  /// Constraint-tree nodes expanded per makespan before giving up.
  std::size_t node_budget = 200'000;
};

struct CbsStats {
  std::size_t expanded = 0;
  std::size_t generated = 0;
};

/// Pairwise reachability relaxation: the first T at which every pair of goal
/// nodes may be occupied together. Never exceeds the optimal makespan. Empty
/// when the relaxation saturates (or passes `horizon`) without getting there.
std::optional<int> makespan_lower_bound(const MapfProblem& m, int horizon);

/// Minimal-makespan schedule with makespan <= horizon. Tries makespans in
/// increasing order from makespan_lower_bound; at each makespan runs
/// conflict-based search whose conflicts are moves without support. Throws
/// Unsolvable when no makespan up to the horizon admits a schedule and
/// BudgetExhausted when one makespan needs more than the node budget.
Schedule cbs_solve(const MapfProblem& m, int horizon, const CbsOptions& options = {},
                   CbsStats* stats = nullptr);

/// Sequential plan as a schedule: one move per step, everyone else waits.
Schedule schedule_from_plan(const MapfProblem& m, const Instance& p, const Plan& plan);

/// Orders the moves of every step so each runs while its support is still
/// occupied. Empty when some step has a cyclic dependency (two movers each
/// vacating the other's support).
std::optional<Plan> serialize_schedule(const MapfProblem& m, const Schedule& s);

/// Reads lines such as "Agent 0: 0(0) 4(1) 4(1)". Node ids follow the
/// numbering above; bracketed values are ignored.
Schedule parse_agent_listing(std::string_view text);

nlohmann::json mapf_to_json(const MapfProblem& m);
MapfProblem mapf_from_json(const nlohmann::json& j);
nlohmann::json schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const nlohmann::json& j);

}  // namespace strips11
