// Constructive upper bounds for hypergraph Ramsey numbers.
//
// For n >= 2 the bound follows the end-homogeneous sequence argument: grow a
// sequence x_1 < x_2 < ... by always keeping the largest color class of the
// remaining points, so that the color of an n-subset only depends on its
// first n-1 elements. A sequence of length R(k, n-1, m-1) + 1 then contains a
// monochromatic m-subset.

#include "msortkit/checked.hpp"
#include "msortkit/error.hpp"
#include "msortkit/ramsey.hpp"

namespace msk {

std::optional<std::uint64_t> try_ramsey_upper_bound(std::uint64_t k, std::uint64_t n, std::uint64_t m) {
  if (k == 0 || n == 0) throw Error("need k >= 1 and n >= 1");
  if (m <= n || k == 1) return m;
  if (n == 1) {
    auto v = checked_mul(k, m - 1);
    return v ? checked_add(*v, 1) : std::nullopt;
  }
  auto inner = try_ramsey_upper_bound(k, n - 1, m - 1);
  if (!inner) return std::nullopt;
  auto t = checked_add(*inner, 1);
  if (!t) return std::nullopt;
  // need(i): points required before choosing x_{i+1} to finish the sequence.
  // need(t-1) = 1 and need(i) = K_i * (need(i+1) - 1) + 2 with K_i = k^C(i, n-2)
  // color classes for the (n-1)-sets ending at x_{i+1}.
  std::uint64_t need = 1;
  for (std::uint64_t i = *t - 1; i-- > 0;) {
    auto c = checked_binomial(i, n - 2);
    auto K = c ? checked_pow(k, *c) : std::nullopt;
    auto prod = K ? checked_mul(*K, need - 1) : std::nullopt;
    auto next = prod ? checked_add(*prod, 2) : std::nullopt;
    if (!next) return std::nullopt;
    need = *next;
  }
  return need;
}

std::optional<std::uint64_t> try_rstar_bound(std::uint64_t k, std::uint64_t n, std::uint64_t m) {
  auto nn = checked_pow(n, n);
  auto colors = nn ? checked_pow(k, *nn) : std::nullopt;
  if (!colors) return std::nullopt;
  auto size = checked_add(m, n - 1);
  if (!size) return std::nullopt;
  return try_ramsey_upper_bound(*colors, n, *size);
}

std::optional<std::uint64_t> try_rstarstar_bound(std::uint64_t k, const std::vector<std::uint64_t>& arities,
                                                 std::uint64_t m) {
  if (arities.empty()) throw Error("need at least one arity");
  std::uint64_t total = 0;
  for (std::uint64_t a : arities) {
    auto s = checked_add(total, a);
    if (!s) return std::nullopt;
    total = *s;
  }
  auto colors = checked_pow(k, arities.size());
  auto size = checked_add(m, 1);
  if (!colors || !size) return std::nullopt;
  return try_rstar_bound(*colors, total, *size);
}

namespace {

std::uint64_t or_throw(std::optional<std::uint64_t> v, const char* what) {
  if (!v) throw OverflowError(std::string(what) + " exceeds 2^64 - 1");
  return *v;
}

}  // namespace

std::uint64_t ramsey_upper_bound(std::uint64_t k, std::uint64_t n, std::uint64_t m) {
  return or_throw(try_ramsey_upper_bound(k, n, m), "Ramsey upper bound");
}

std::uint64_t rstar_bound(std::uint64_t k, std::uint64_t n, std::uint64_t m) {
  return or_throw(try_rstar_bound(k, n, m), "R* bound");
}

std::uint64_t rstarstar_bound(std::uint64_t k, const std::vector<std::uint64_t>& arities, std::uint64_t m) {
  return or_throw(try_rstarstar_bound(k, arities, m), "R** bound");
}

}  // namespace msk
