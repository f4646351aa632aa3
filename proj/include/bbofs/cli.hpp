#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace bbofs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;    // bad flags or unreadable / invalid input data
inline constexpr int kExitRuntime = 3;  // failure while computing

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Primary output goes to files or `out`; logs go to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace bbofs::cli
