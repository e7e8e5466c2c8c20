#include "strips11/litgraph.hpp"

#include <algorithm>
#include <array>
#include <set>

#include <fmt/core.h>

namespace strips11 {

namespace {

constexpr std::array<const char*, 8> kPalette = {"red",    "blue",  "darkgreen", "orange",
                                                 "purple", "brown", "magenta",   "cyan"};

const char* goal_color(Literal l) { return kPalette[static_cast<std::size_t>(l.var) % 8]; }

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

LiteralGraph build_literal_graph(const Instance& p) {
  p.check();
  LiteralGraph g;
  g.n = p.n;
  for (const Action& a : p.actions) {
    g.edges.push_back({a.pre.node(p.n), a.eff.node(p.n), a.id});
  }
  return g;
}

std::vector<int> Subplan::actions(const Plan& plan) const {
  std::vector<int> out;
  for (std::size_t pos : positions) out.push_back(plan.steps.at(pos));
  return out;
}

SubplanTable::SubplanTable(const Instance& p, const Plan& plan)
    : n_(p.n), length_(plan.steps.size()) {
  validate_plan(Instance{p.n, p.actions, p.init, std::nullopt}, plan);
  const std::size_t width = length_ + 1;
  table_.resize(static_cast<std::size_t>(2 * n_) * width);
  pre_.reserve(length_);
  for (int id : plan.steps) pre_.push_back(p.actions[static_cast<std::size_t>(id)].pre);

  // last[node]: most recent achiever position + 1, or 0 for none yet.
  std::vector<std::size_t> last(static_cast<std::size_t>(2 * n_), 0);
  for (std::size_t i = 0; i <= length_; ++i) {
    if (i > 0) {
      const Literal eff = p.actions[static_cast<std::size_t>(plan.steps[i - 1])].eff;
      last[static_cast<std::size_t>(eff.node(n_))] = i;
    }
    for (int node = 0; node < 2 * n_; ++node) {
      Entry& e = table_[static_cast<std::size_t>(node) * width + i];
      const std::size_t j = last[static_cast<std::size_t>(node)];
      if (j > 0) {
        e.kind = Entry::Kind::kExtend;
        e.position = j - 1;
      } else {
        e.kind = holds(p.init, Literal::from_node(node, n_)) ? Entry::Kind::kEmpty
                                                            : Entry::Kind::kIllegal;
      }
    }
  }
  // An extension is illegal when its precondition's entry is; fill in
  // position order so the referenced entry (at j-1 < i) is final.
  for (std::size_t i = 0; i <= length_; ++i) {
    for (int node = 0; node < 2 * n_; ++node) {
      Entry& e = table_[static_cast<std::size_t>(node) * width + i];
      if (e.kind != Entry::Kind::kExtend) continue;
      if (entry(pre_[e.position], e.position).kind == Entry::Kind::kIllegal) {
        e.kind = Entry::Kind::kIllegal;
      }
    }
  }
}

const SubplanTable::Entry& SubplanTable::entry(Literal l, std::size_t i) const {
  if (i > length_) throw InvalidArgument("prefix length exceeds the plan");
  if (l.var < 0 || l.var >= n_) throw InvalidArgument("literal out of range");
  return table_[static_cast<std::size_t>(l.node(n_)) * (length_ + 1) + i];
}

bool SubplanTable::legal(Literal l, std::size_t i) const {
  return entry(l, i).kind != Entry::Kind::kIllegal;
}

Subplan SubplanTable::subplan(Literal l, std::size_t i) const {
  Subplan out;
  for (const Entry* e = &entry(l, i);;) {
    if (e->kind == Entry::Kind::kIllegal) return Subplan::illegal();
    if (e->kind == Entry::Kind::kEmpty) break;
    out.positions.push_back(e->position);
    e = &entry(pre_[e->position], e->position);
  }
  std::ranges::reverse(out.positions);
  return out;
}

Subplan subplan(const Instance& p, const Plan& plan, Literal l, std::size_t i) {
  return SubplanTable(p, plan).subplan(l, i);
}

GoalSubplans goal_subplans(const Instance& p, const Plan& plan) {
  if (!p.goal) throw PlanDoesNotSolve("instance has no goal state");
  try {
    validate_plan(p, plan);
  } catch (const Error& e) {
    throw PlanDoesNotSolve(std::string("plan does not solve the instance: ") + e.what());
  }
  const SubplanTable table(p, plan);
  GoalSubplans out;
  for (int v = 0; v < p.n; ++v) {
    const Literal l{v, p.goal->get(v)};
    out.emplace(l, table.subplan(l, plan.steps.size()));
  }
  return out;
}

std::vector<std::size_t> OverlapTree::path_to(int node) const {
  std::vector<std::size_t> out;
  for (int cur = node; cur > 0; cur = nodes[static_cast<std::size_t>(cur)].parent) {
    out.push_back(nodes[static_cast<std::size_t>(cur)].position);
  }
  std::ranges::reverse(out);
  return out;
}

std::size_t OverlapTree::terminal_count() const {
  std::size_t count = 0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!nodes[i].goals.empty()) ++count;
  }
  return count;
}

OverlapTree build_overlap_tree(const GoalSubplans& subplans) {
  OverlapTree t;
  t.nodes.emplace_back();
  for (const auto& [goal, sp] : subplans) {
    if (!sp.legal) throw InvalidArgument("illegal subplan for " + goal.to_string());
    int cur = 0;
    for (std::size_t pos : sp.positions) {
      int next = -1;
      for (int child : t.nodes[static_cast<std::size_t>(cur)].children) {
        if (t.nodes[static_cast<std::size_t>(child)].position == pos) {
          next = child;
          break;
        }
      }
      if (next < 0) {
        next = static_cast<int>(t.nodes.size());
        OverlapTree::Node node;
        node.parent = cur;
        node.position = pos;
        node.depth = t.nodes[static_cast<std::size_t>(cur)].depth + 1;
        t.nodes.push_back(node);
        t.nodes[static_cast<std::size_t>(cur)].children.push_back(next);
      }
      cur = next;
    }
    t.nodes[static_cast<std::size_t>(cur)].goals.push_back(goal);
  }
  return t;
}

DivergenceReport divergence_report(const GoalSubplans& subplans, const Plan& plan) {
  DivergenceReport r;
  r.plan_length = plan.steps.size();
  r.tree_edges = build_overlap_tree(subplans).edge_count();
  std::vector<std::pair<Literal, const Subplan*>> items;
  for (const auto& [l, sp] : subplans) items.emplace_back(l, &sp);
  for (std::size_t a = 0; a < items.size(); ++a) {
    for (std::size_t b = a + 1; b < items.size(); ++b) {
      const auto& pa = items[a].second->positions;
      const auto& pb = items[b].second->positions;
      std::size_t common = 0;
      while (common < pa.size() && common < pb.size() && pa[common] == pb[common]) ++common;
      // One subplan is a prefix of the other: they never diverged.
      if (common == pa.size() || common == pb.size()) continue;
      std::set<int> first;
      for (std::size_t k = common; k < pa.size(); ++k) first.insert(plan.steps[pa[k]]);
      std::set<int> reported;
      for (std::size_t k = common; k < pb.size(); ++k) {
        const int action = plan.steps[pb[k]];
        if (first.contains(action) && reported.insert(action).second) {
          r.shared_after_divergence.push_back({items[a].first, items[b].first, action});
        }
      }
    }
  }
  return r;
}

std::string export_dot(const LiteralGraph& g) {
  std::string out = "digraph literal_graph {\n  rankdir=LR;\n";
  for (int node = 0; node < g.node_count(); ++node) {
    out += fmt::format("  {};\n", quoted(Literal::from_node(node, g.n).to_string()));
  }
  for (const auto& e : g.edges) {
    out += fmt::format("  {} -> {} [label=\"a{}\"];\n",
                       quoted(Literal::from_node(e.from, g.n).to_string()),
                       quoted(Literal::from_node(e.to, g.n).to_string()), e.action);
  }
  out += "}\n";
  return out;
}

std::string export_dot(const LiteralGraph& g, const Plan& plan, const GoalSubplans& subplans) {
  std::map<int, std::vector<std::size_t>> uses;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) uses[plan.steps[i]].push_back(i + 1);
  std::map<int, std::vector<Literal>> colored;
  for (const auto& [goal, sp] : subplans) {
    for (int action : sp.actions(plan)) {
      auto& list = colored[action];
      if (std::ranges::find(list, goal) == list.end()) list.push_back(goal);
    }
  }

  std::string out = "digraph literal_graph {\n  rankdir=LR;\n";
  for (int node = 0; node < g.node_count(); ++node) {
    const Literal l = Literal::from_node(node, g.n);
    std::string attrs;
    if (subplans.contains(l)) attrs = fmt::format(" [peripheries=2, color={}]", goal_color(l));
    out += fmt::format("  {}{};\n", quoted(l.to_string()), attrs);
  }
  for (const auto& e : g.edges) {
    std::string label = fmt::format("a{}", e.action);
    if (auto it = uses.find(e.action); it != uses.end()) {
      label += ":";
      for (std::size_t k = 0; k < it->second.size(); ++k) {
        label += (k == 0 ? " " : ",") + std::to_string(it->second[k]);
      }
    }
    std::string attrs = fmt::format("label=\"{}\"", label);
    if (auto it = colored.find(e.action); it != colored.end()) {
      std::string colors;
      for (const Literal l : it->second) colors += (colors.empty() ? "" : ":") + std::string(goal_color(l));
      attrs += fmt::format(", color=\"{}\", penwidth=2", colors);
    }
    out += fmt::format("  {} -> {} [{}];\n", quoted(Literal::from_node(e.from, g.n).to_string()),
                       quoted(Literal::from_node(e.to, g.n).to_string()), attrs);
  }
  out += "}\n";
  return out;
}

std::string export_dot(const OverlapTree& t, const Plan& plan) {
  std::string out = "digraph overlap_tree {\n";
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& node = t.nodes[i];
    std::string label = i == 0 ? "root" : "";
    std::string attrs;
    for (const Literal g : node.goals) {
      label += (label.empty() ? "" : " ") + g.to_string();
      attrs = fmt::format(", style=filled, fillcolor={}", goal_color(g));
    }
    out += fmt::format("  n{} [label=\"{}\"{}];\n", i, label, attrs);
  }
  for (std::size_t i = 1; i < t.nodes.size(); ++i) {
    const auto& node = t.nodes[i];
    out += fmt::format("  n{} -> n{} [label=\"a{}@{}\"];\n", node.parent, i,
                       plan.steps.at(node.position), node.position + 1);
  }
  out += "}\n";
  return out;
}

}  // namespace strips11
