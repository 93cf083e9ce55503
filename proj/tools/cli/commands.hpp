#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jointtag::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kValidationError = 2,
  kNumericError = 3,
};

// Runs one subcommand. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jointtag::cli
