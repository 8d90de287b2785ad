#include "msortkit/limits.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace msk {

std::uint64_t enumeration_cap(std::uint64_t fallback) {
  const char* env = std::getenv("MSORT_CAP");
  if (!env || !*env) return fallback;
  std::uint64_t value = 0;
  const char* end = env + std::strlen(env);
  auto [ptr, ec] = std::from_chars(env, end, value);
  if (ec != std::errc() || ptr != end || value == 0) return fallback;
  return value;
}

}  // namespace msk
