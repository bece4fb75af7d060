#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mceus::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;    // bad arguments or files
inline constexpr int kExitNumeric = 3;  // numeric or contract failure

/// Runs one CLI invocation. `args` excludes the program name. Machine-readable
/// output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mceus::cli
