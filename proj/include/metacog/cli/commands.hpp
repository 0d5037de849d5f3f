#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace metacog::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,
    kExitUsage = 2,
    kExitInput = 3,         ///< unreadable or malformed input file
    kExitNotConverged = 4,  ///< fit written, but the optimizer did not converge
    kExitAborted = 5,       ///< harness run stopped early
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace metacog::cli
