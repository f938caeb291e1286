#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace celltree::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kAdmissibility = 3,
  kIo = 4,
};

/// Runs the tool with `args` (excluding the program name). Output goes to
/// `out`, diagnostics to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

inline constexpr const char* kVersion = "0.3.0";

}  // namespace celltree::cli
