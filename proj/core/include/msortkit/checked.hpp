#pragma once

#include <cstdint>
#include <optional>

namespace msk {

// Arithmetic on std::uint64_t that reports overflow as std::nullopt.

inline std::optional<std::uint64_t> checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
  return r;
}

inline std::optional<std::uint64_t> checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
  return r;
}

inline std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t result = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    auto next = checked_mul(result, base);
    if (!next) return std::nullopt;
    result = *next;
    // 0 and 1 are fixed points; no need to keep multiplying.
    if (result <= 1) return result;
  }
  return result;
}

inline std::optional<std::uint64_t> checked_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i stays integral at every step.
    auto num = checked_mul(result, n - k + i);
    if (!num) return std::nullopt;
    result = *num / i;
  }
  return result;
}

}  // namespace msk
