#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace n00n::cli {

/// Runs the `n00n` command line with args (excluding the program name).
/// Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace n00n::cli
