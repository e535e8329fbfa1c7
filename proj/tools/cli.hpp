#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pkd::cli {

enum ExitCode : int {
  kOk = 0,
  kBadFlags = 2,
  kKeyPool = 3,
  kNegotiationOverflow = 4,
  kVerificationFailed = 5,
};

/// Largest N accepted by `simulate`; larger runs belong to `keyrate`.
inline constexpr double kMaxSimulatedRounds = 1e8;

/// Runs the command line `args` (without the program name). Records go to
/// `out`, diagnostics to `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace pkd::cli
