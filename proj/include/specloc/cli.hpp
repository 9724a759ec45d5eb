#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace specloc::cli {

/// Runs one subcommand. `args` excludes the program name.
/// Exit codes: 0 success, 1 a check failed (or a numerical error), 2 bad input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace specloc::cli
