#pragma once

#include <iostream>
#include <span>
#include <string>

namespace vbpbb {

/// Exit codes: 0 success, 2 input/data error, 3 configuration error.
enum ExitCode : int { kExitOk = 0, kExitDataError = 2, kExitConfigError = 3 };

/// Runs one CLI invocation; args[0] is the program name.
int cli_dispatch(std::span<const std::string> args, std::ostream& out = std::cout,
                 std::ostream& err = std::cerr);

} // namespace vbpbb
