#pragma once

// Literal graphs, per-literal subplans of a plan, and overlap trees.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "strips11/core.hpp"

namespace strips11 {

/// 2n literal nodes (Literal::node numbering) and one edge per action from
/// its precondition to its effect. Parallel edges are kept.
struct LiteralGraph {
  struct Edge {
    int from = 0;
    int to = 0;
    int action = 0;
  };
  int n = 0;
  std::vector<Edge> edges;

  int node_count() const { return 2 * n; }
};

LiteralGraph build_literal_graph(const Instance& p);

/// Subsequence of a plan, as 0-based plan positions, or the illegal marker.
struct Subplan {
  bool legal = true;
  std::vector<std::size_t> positions;

  static Subplan illegal() { return Subplan{false, {}}; }
  std::vector<int> actions(const Plan& plan) const;

  friend bool operator==(const Subplan&, const Subplan&) = default;
};

/// Subplans of one plan for every (literal, prefix length). The table keeps
/// one entry per (l, i): the last achiever of l within the first i steps and
/// a link to the entry of its precondition, so shared prefixes are stored
/// once.
class SubplanTable {
 public:
  SubplanTable(const Instance& p, const Plan& plan);

  /// Subplan certifying l after the first i plan steps, 0 <= i <= |plan|.
  Subplan subplan(Literal l, std::size_t i) const;
  bool legal(Literal l, std::size_t i) const;
  std::size_t plan_length() const { return length_; }

 private:
  struct Entry {
    enum class Kind : unsigned char { kIllegal, kEmpty, kExtend };
    Kind kind = Kind::kIllegal;
    std::size_t position = 0;  // kExtend: plan index j of the last achiever
  };
  const Entry& entry(Literal l, std::size_t i) const;

  int n_;
  std::size_t length_;
  std::vector<Literal> pre_;  // precondition per plan position
  std::vector<Entry> table_;  // [node][i]
};

Subplan subplan(const Instance& p, const Plan& plan, Literal l, std::size_t i);

class PlanDoesNotSolve : public Error {
 public:
  using Error::Error;
};

using GoalSubplans = std::map<Literal, Subplan>;

/// Subplan at the full plan length for every goal literal. Throws
/// PlanDoesNotSolve when the instance has no goal or the plan misses it.
GoalSubplans goal_subplans(const Instance& p, const Plan& plan);

/// Trie over goal subplans keyed by plan positions. Node 0 is the root.
struct OverlapTree {
  struct Node {
    int parent = -1;
    std::size_t position = 0;  // label of the edge from the parent
    int depth = 0;
    std::vector<int> children;
    std::vector<Literal> goals;  // goal literals whose subplan ends here
  };
  std::vector<Node> nodes;

  std::vector<std::size_t> path_to(int node) const;
  /// Nodes, other than the root, where at least one subplan ends.
  std::size_t terminal_count() const;
  std::size_t edge_count() const { return nodes.empty() ? 0 : nodes.size() - 1; }
};

/// Throws InvalidArgument if a subplan is illegal.
OverlapTree build_overlap_tree(const GoalSubplans& subplans);

/// Pairs of goal subplans that, after their common prefix, still use a common
/// action. Reported as observations; nothing enforces their absence.
struct DivergenceReport {
  struct Shared {
    Literal first;
    Literal second;
    int action = 0;
  };
  std::vector<Shared> shared_after_divergence;
  std::size_t tree_edges = 0;
  std::size_t plan_length = 0;
};

DivergenceReport divergence_report(const GoalSubplans& subplans, const Plan& plan);

std::string export_dot(const LiteralGraph& g);
/// Edges list the 1-based plan positions using them; edges on a goal
/// subplan carry one palette color per goal literal.
std::string export_dot(const LiteralGraph& g, const Plan& plan, const GoalSubplans& subplans);
std::string export_dot(const OverlapTree& t, const Plan& plan);

}  // namespace strips11
