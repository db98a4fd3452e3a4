#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bonefrag::cli {

enum ExitCode : int { kSuccess = 0, kInternalError = 1, kValidationError = 2, kDataError = 3 };

// Entry point of the `bonefrag` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bonefrag::cli
