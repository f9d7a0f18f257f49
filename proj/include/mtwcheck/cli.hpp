#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mtw {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitViolation = 1, kExitUsage = 2, kExitNumerical = 3 };

/// Runs the `mtw` command line; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mtw
