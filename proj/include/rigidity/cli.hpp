#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rigidity::cli {

/// Exit codes of the strip_rigidity tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// `A:B:N` gives N+1 linear points, `logA:B:N` N+1 log-spaced points, and a
/// comma list or a single number is taken verbatim.
std::vector<double> parse_grid(std::string_view text);

/// `A:B:STEP` for scan ranges.
struct StepRange {
  double lo;
  double hi;
  double step;
};
StepRange parse_step_range(std::string_view text);

/// Expands `--config PATH` (key = value lines) into flags for every key not
/// already present on the command line. `true` becomes a bare flag and
/// `false` drops it.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

/// Runs one command; args exclude the program name. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rigidity::cli
