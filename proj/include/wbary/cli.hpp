#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wbary::cli {

// Runs the command line tool on the given arguments (program name excluded).
// Returns the process exit code: 0 on success, 1 on input or validation
// failure, 2 on solver failure.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace wbary::cli
