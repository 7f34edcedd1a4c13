#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace momx::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kVerificationFailed = 2,
  kStructuralGate = 3,
  kParameterGate = 4,
};

// Runs the command line `args` (args[0] is the program name) and returns the
// exit code. Human-readable progress goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace momx::cli
