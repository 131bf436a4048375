#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rcep {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitInfeasible = 3,
  kExitResource = 4,
  kExitNumeric = 5,
};

/// Entry point of the `rcep` tool with injectable streams. args excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rcep
