#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace replivol::cli {

/// Runs the command line `args` (without the program name) and returns the
/// process exit code: 0 success, 2 input error, 3 domain refusal, 4 internal.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace replivol::cli
