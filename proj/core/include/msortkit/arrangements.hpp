#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "msortkit/structure.hpp"
#include "msortkit/syntax.hpp"

namespace msk {

/// Largest set whose partitions are enumerated without an explicit cap.
inline constexpr std::size_t kDefaultPartitionCap = 10;

/// A set partition; blocks are listed by their smallest member, members in
/// input order.
using Partition = std::vector<std::vector<std::string>>;

/// Restricted growth strings of length n in lexicographic order.
std::vector<std::vector<std::size_t>> restricted_growth_strings(std::size_t n,
                                                                std::size_t cap = kDefaultPartitionCap);
std::vector<Partition> enumerate_partitions(const std::vector<std::string>& items,
                                            std::size_t cap = kDefaultPartitionCap);

/// Number of set partitions of an n-set; throws OverflowError past 64 bits.
std::uint64_t bell(std::size_t n);

/// An equivalence relation on each sort's variables.
struct Arrangement {
  std::map<Sort, Partition> per_sort;

  bool same_block(const Variable& a, const Variable& b) const;
  bool operator==(const Arrangement&) const = default;
};

/// Conjunction, per sort and over lexicographic pairs x < y, of (= x y) for
/// pairs in one block and (not (= x y)) otherwise. Always an `and` node unless
/// there are no pairs, in which case the result is true.
FormulaPtr arrangement_formula(const Arrangement& delta);

/// Calls `visit` for every arrangement of V (last sort varies fastest) until it
/// returns false. Throws CapExceeded if some sort has more than `cap` variables.
void for_each_arrangement(const VariableSet& V, const std::function<bool(const Arrangement&)>& visit,
                          std::size_t cap = kDefaultPartitionCap);
std::vector<Arrangement> enumerate_arrangements(const VariableSet& V, std::size_t cap = kDefaultPartitionCap);
/// Product of bell(|V_σ|).
std::uint64_t count_arrangements(const VariableSet& V);

Arrangement arrangement_of_interpretation(const Structure& A, const Assignment& nu, const VariableSet& V);

/// "S1: {x y} | S2: {u} {v w}"; "(empty)" for no sorts.
std::string print_arrangement(const Arrangement& delta);

}  // namespace msk
