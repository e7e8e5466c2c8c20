#pragma once

// Command-line front end. Exit codes: 0 success, 1 domain failure
// (unsatisfiable, unreachable, property violated), 2 usage or I/O error.

#include <iosfwd>
#include <string>
#include <vector>

namespace strips11::cli {

inline constexpr int kOk = 0;
inline constexpr int kDomainFailure = 1;
inline constexpr int kUsage = 2;

/// Environment variable naming the default SAT solver command.
inline constexpr const char* kSolverEnv = "STRIPS11_SAT_SOLVER";

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace strips11::cli
