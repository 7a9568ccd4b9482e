#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace forge::cli {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumericFailure = 3 };

/// Runs `forge` with `args` (program name excluded). Tables and listings go
/// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace forge::cli
