#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace memochaos::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitDivergence = 3,
  kExitIo = 4,
};

/// Inclusive grid given on the command line as `min:max:count`.
struct Range {
  double min = 0.0;
  double max = 0.0;
  int count = 0;
};

/// Parses `min:max:count`. count must be >= 1, and min < max when
/// count > 1 (min == max when count == 1). Throws memochaos::InvalidArgument.
Range parse_range(std::string_view text);

/// Runs the tool with argv-style arguments (args[0] is the program name).
/// Normal output goes to `out`, diagnostics and progress to `err`.
/// Returns one of the ExitCode values.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace memochaos::cli
