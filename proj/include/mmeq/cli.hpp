#pragma once

#include <string>
#include <vector>

namespace mmeq::cli {

// Parses and executes one invocation; `args` is argv without the program
// name. Returns the process exit code:
//   0  success / all checks pass
//   1  verification failure (a named check failed, or a profitable misreport)
//   2  usage or validation error (bad flags, bad JSON, mismatched documents)
//   3  infeasible instance (no equilibrium/solution exists; witness on stderr)
int run_command(std::vector<std::string> args);

} // namespace mmeq::cli
