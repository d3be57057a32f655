#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace umt {

inline constexpr const char* kVersion = "0.1.0";

// Runs one command. args excludes the program name. Returns the exit code:
// 0 when every check passed, 1 when a property failed, 2 on input or guard
// errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace umt
