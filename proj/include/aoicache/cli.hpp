#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aoicache::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kInfeasible = 3,
    kOverload = 4,
};

/// Runs the command line (without the program name) and returns the exit
/// status. Results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aoicache::cli
