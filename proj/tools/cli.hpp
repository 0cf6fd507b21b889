#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trisieve::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Runs the command line `args` (without the program name). Human-readable
/// output goes to `out`, diagnostics to `err`; returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trisieve::cli
