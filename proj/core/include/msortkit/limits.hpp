#pragma once

#include <cstdint>

namespace msk {

/// Default cap on structures, formulas, or search nodes visited by a single
/// enumeration. The MSORT_CAP environment variable overrides it.
inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Returns MSORT_CAP if set to a positive integer, else `fallback`.
std::uint64_t enumeration_cap(std::uint64_t fallback = kDefaultEnumerationCap);

}  // namespace msk
