#pragma once

// Command-line front end. `run_cli` holds the whole program so it can be
// driven from tests; tools/mmv.cpp only forwards argv.
//
// Exit codes: 0 success, 1 usage, 2 malformed or inconsistent data,
// 3 numeric failure (non-convergence, singular input, failed check).

#include <iosfwd>
#include <string>
#include <vector>

namespace mmv {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmv
