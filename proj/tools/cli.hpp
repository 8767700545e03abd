#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tailsum::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericError = 2 };

/// Runs the CLI on an argument vector (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tailsum::cli
