#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace plasmadiag::cli {

enum ExitCode : int { kSuccess = 0, kRuntimeError = 1, kUsageError = 2 };

// Runs one command line (args excludes the program name). Results go to `out`,
// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace plasmadiag::cli
