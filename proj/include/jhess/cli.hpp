#pragma once

#include <iosfwd>

namespace jhess {

/// Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 input error.
enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitInputError = 2 };

/// Entry point of the `jhess` command-line tool. Reports are written to `out`
/// (or to the --out file), diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jhess
