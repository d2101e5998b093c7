#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nulldl {

// Runs the command-line driver. Exit codes: 0 success, 1 user error
// (diagnostic on `err`), 2 internal invariant failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace nulldl
