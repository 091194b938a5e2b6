#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace matsf::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kDataError = 2,
  kDivergence = 3,
};

/// Entry point shared by the `matsf` binary and the tests. `args` excludes
/// the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace matsf::cli
