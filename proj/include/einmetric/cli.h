#pragma once

#include <ostream>

namespace einmetric::cli {

/// Exit codes returned by run().
enum ExitCode : int {
  kSuccess = 0,
  kInputError = 1,
  kNotConverged = 2,
  kVerificationFailed = 3,
  kPositivityViolated = 4,
};

/// Entry point shared by the executable and the tests.
/// Subcommands: solve, verify, bounds, generate, gradcheck.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace einmetric::cli
