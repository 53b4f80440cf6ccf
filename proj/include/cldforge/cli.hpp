#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cldforge {

// Exit codes of the cldforge command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNoDigraph = 2;

// Runs one cldforge invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace cldforge
