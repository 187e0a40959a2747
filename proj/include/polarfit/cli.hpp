// cli.hpp — command-line entry point, exposed as a function so the test
// suite can drive complete runs in-process.

#pragma once

#include <string>
#include <vector>

namespace polarfit::cli {

// Runs one subcommand; `args` excludes the program name. Returns the process
// exit code: 0 success, 1 physics/solver error, 2 usage error.
int run(const std::vector<std::string>& args);

} // namespace polarfit::cli
