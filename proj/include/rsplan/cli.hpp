#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rsplan {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitVerificationFailed = 1,
    kExitInput = 2,
    kExitCertification = 3,
    kExitSolver = 4,
    kExitSimulation = 5,
};

/// Runs one command line (args exclude the program name), e.g.
///   {"verify", "instance.json", "--paths", "20000", "--out", "run1"}.
/// Human-readable output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rsplan
