#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phishkd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitPhish = 10;

// `args` excludes the program name. Logging goes to `err` for the duration
// of the call.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phishkd::cli
