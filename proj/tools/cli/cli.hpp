#pragma once

#include <iosfwd>

namespace stoprule::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitInvalidInput = 1,
    kExitAssumption = 2,
    kExitGuard = 3,
    kExitCheckFailed = 4,
};

/// Runs one command line; all output goes to `out` / `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stoprule::cli
