#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ucca {

// Exit statuses of the command-line tool.
enum ExitStatus : int {
  kExitOk = 0,
  kExitDiagnostics = 1,  // error-severity diagnostics were reported
  kExitFailure = 2,      // parse, IO or format failure
  kExitUsage = 3,
};

// Runs the tool with argv-style arguments (args[0] is the program name).
// Nothing is written to `out` when the result is kExitFailure or kExitUsage.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ucca
