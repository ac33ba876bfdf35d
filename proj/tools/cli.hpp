#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace geoknn::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 2,
  kDataError = 3,
  kDegenerate = 4,
};

/// Runs the command line `args` (args[0] is the program name). Regular output
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace geoknn::cli
