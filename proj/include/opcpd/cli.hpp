#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace opcpd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

// Runs the command-line tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace opcpd
