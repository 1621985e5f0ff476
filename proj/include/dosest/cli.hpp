#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dosest {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInvalid = 1, kExitRuntime = 2 };

/// Runs the command line `args` (without the program name).
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dosest
