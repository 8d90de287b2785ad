#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace msk::cli {

inline constexpr int kExitUsage = 64;
inline constexpr int kExitCap = 65;

/// Runs one msort-kit invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace msk::cli
