#pragma once

// CNF whose models are (instance over all canonical actions, plan of exactly
// L steps from 0^n whose final state is at BFS distance exactly L).
//
// Variable groups, numbered densely from 1 in this order:
//   action(a)   a in [0, 4n^2-4n), canonical action order
//   path(t, v)  t in [0, L]: value of variable v after t steps
//   flip(t, v)  t in [1, L]: step t changes variable v
//   bfs(t, u)   t in [0, L-1]: state u is reachable within t steps
//   aux(t, a)   t in [1, L]: step t is justified by action a

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "strips11/core.hpp"

namespace strips11 {

struct CnfLayout {
  int n = 0;
  int length = 0;
  int actions = 0;
  int action_first = 1;
  int path_first = 0;
  int flip_first = 0;
  int bfs_first = 0;
  int aux_first = 0;
  int num_vars = 0;

  static CnfLayout make(int n, int length);

  int action_var(int a) const;
  int path_var(int t, int v) const;
  int flip_var(int t, int v) const;
  int bfs_var(int t, std::uint64_t u) const;
  int aux_var(int t, int a) const;

  friend bool operator==(const CnfLayout&, const CnfLayout&) = default;
};

struct CnfArtifact {
  CnfLayout layout;
  std::vector<std::vector<int>> clauses;

  int num_vars() const { return layout.num_vars; }
  friend bool operator==(const CnfArtifact&, const CnfArtifact&) = default;
};

/// Requires 2 <= n <= 7 and L >= 1.
CnfArtifact encode(int n, int length);

std::string write_dimacs(const CnfArtifact& cnf);
/// Reads a file produced by write_dimacs; the layout comes from its comments.
CnfArtifact parse_dimacs(std::string_view text);

/// Assignment indexed by variable (entry 0 unused).
struct Model {
  std::vector<bool> values;
  bool value(int var) const { return values.at(static_cast<std::size_t>(var)); }
};

enum class SolveStatus { kSat, kUnsat, kUnknown };

struct SolverOutput {
  SolveStatus status = SolveStatus::kUnknown;
  std::optional<Model> model;
};

/// Parses competition-style solver output ("s SATISFIABLE", "v ... 0") and
/// the bare "SAT" / literal-list form some solvers write to files.
SolverOutput parse_solver_output(std::string_view text, int num_vars);

class ModelInconsistent : public Error {
 public:
  using Error::Error;
};

struct Decoded {
  Instance instance;  // init 0^n, goal = final path state
  Plan plan;
};

Decoded decode(const Model& model, const CnfArtifact& cnf);

/// plan validates, has exactly `length` steps, and BFS from 0^n puts its
/// final state at distance exactly `length`.
bool verify_certificate(const Instance& p, const Plan& plan, std::uint64_t length);

/// Runs `command <cnf_path>` through the shell and parses its stdout.
SolverOutput run_solver(const std::string& command, const std::string& cnf_path, int num_vars);

struct SweepStep {
  int length = 0;
  SolveStatus status = SolveStatus::kUnknown;
  bool certified = false;
  double seconds = 0;
};

struct SweepResult {
  std::vector<SweepStep> steps;
  std::optional<int> best;
  std::optional<Decoded> certificate;  // for `best`
};

/// Solves encode(n, L) for L = from, from+1, ... until the first
/// unsatisfiable length or `to`. Every satisfiable model is decoded and
/// certified; an uncertified model throws ModelInconsistent.
SweepResult sweep(int n, int from, std::optional<int> to, const std::string& command,
                  const std::string& workdir);

}  // namespace strips11
