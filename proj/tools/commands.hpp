#pragma once

#include <string>
#include <vector>

namespace mapland::cli {

// Parses args (without the program name), runs the subcommand and returns
// the process exit code. Errors are reported on stderr.
int run(const std::vector<std::string>& args);

}  // namespace mapland::cli
