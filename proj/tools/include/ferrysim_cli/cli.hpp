#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ferry::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;   // bad flags, unreadable or invalid config
inline constexpr int kExitRuntime = 2; // failed runs, unwritable output

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputDirEnv = "FERRYSIM_OUTPUT_DIR";

/// Entry point of the `ferrysim` tool. `args` excludes the program name.
/// Errors are reported on `err` as one line:
///   ferrysim-error kind=<usage|config|io|runtime> field=<name> message=<text>
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ferry::cli
