// cli.hpp - Command-line front end shared by the `whnc` executable and tests.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace whnc {

enum ExitCode : int {
    kExitOk = 0,
    kExitDeadlineMiss = 1,
    kExitInvalid = 2,
    kExitUnsound = 3,
};

// `args` excludes the program name. Data goes to `out` (or the --output
// file), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace whnc
