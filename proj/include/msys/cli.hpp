#pragma once

// Command-line front end. Every command prints one JSON report on `out`.
// Exit codes: 0 pass, 2 property failure or inconclusive search, 1 usage,
// parse or precondition error.

#include <ostream>
#include <string>
#include <vector>

namespace msys::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFail = 2;

/// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace msys::cli
