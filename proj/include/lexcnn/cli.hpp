#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lexcnn {

/// Runs the command line (without the program name). Returns the process exit code:
/// 0 ok, 1 usage, 2 data, 3 numeric.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lexcnn
