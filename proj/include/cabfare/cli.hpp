#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cabfare {

/// Runs the command line with `args` excluding the program name. Returns
/// the process exit code: 0 success, 1 configuration or storage, 2 routing
/// or upstream provider, 3 invalid user input.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace cabfare
