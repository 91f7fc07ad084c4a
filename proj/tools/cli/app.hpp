#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace prepay::cli {

// Exit codes: 0 ok, 2 input/config error, 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

// Runs one command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prepay::cli
