#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msortkit/error.hpp"
#include "msortkit/limits.hpp"

namespace msk {

using GroundElement = std::uint64_t;

/// Rank labels of a tuple: entry i is the number of distinct values below x_i.
/// Two tuples get the same pattern exactly when they realize the same
/// order and equality relations between positions.
using Pattern = std::vector<std::uint32_t>;

Pattern pattern_of(std::span<const GroundElement> x);
/// Dense index of a pattern of length n (base-n digits, first most significant).
std::uint64_t pattern_code(const Pattern& p);

/// Ordered Bell number: the number of patterns of length n. Throws
/// OverflowError past 64 bits.
std::uint64_t fubini(std::size_t n);

/// A k-coloring of the n-subsets (Subsets mode, arguments strictly increasing)
/// or of all n-tuples (Tuples mode) of the ground set {0, ..., N-1}. Colors
/// are in [1, k]. Colorings are evaluated lazily, so N may be huge.
class Coloring {
 public:
  enum class Mode { Subsets, Tuples };
  using Function = std::function<std::uint32_t(std::span<const GroundElement>)>;

  static Coloring subsets(std::size_t arity, std::uint32_t colors, GroundElement ground, Function f);
  static Coloring tuples(std::size_t arity, std::uint32_t colors, GroundElement ground, Function f);
  /// Pseudorandom colorings derived from a hash of (seed, arguments).
  static Coloring random_subsets(std::size_t arity, std::uint32_t colors, GroundElement ground, std::uint64_t seed);
  static Coloring random_tuples(std::size_t arity, std::uint32_t colors, GroundElement ground, std::uint64_t seed);
  static Coloring constant(Mode mode, std::size_t arity, std::uint32_t colors, GroundElement ground,
                           std::uint32_t color = 1);

  Mode mode() const { return mode_; }
  std::size_t arity() const { return arity_; }
  std::uint32_t colors() const { return colors_; }
  GroundElement ground() const { return ground_; }

  /// Throws Error on a malformed argument tuple or an out-of-range color.
  std::uint32_t color(std::span<const GroundElement> args) const;
  std::uint32_t operator()(std::span<const GroundElement> args) const { return color(args); }

 private:
  Coloring(Mode mode, std::size_t arity, std::uint32_t colors, GroundElement ground, Function f);

  Mode mode_;
  std::size_t arity_;
  std::uint32_t colors_;
  GroundElement ground_;
  Function f_;
};

struct RamseySearchOptions {
  std::uint64_t node_cap = enumeration_cap();
};

/// Witness sets are sorted increasingly. Each search returns the
/// lexicographically first m-element witness, so an empty result is an
/// exhaustive refutation; a verified witness is always re-checked before it
/// is returned.
std::optional<std::vector<GroundElement>> ramsey_search(const Coloring& f, std::size_t m,
                                                        const RamseySearchOptions& options = {});
std::optional<std::vector<GroundElement>> directed_ramsey_search(const Coloring& f, std::size_t m,
                                                                 const RamseySearchOptions& options = {});
std::optional<std::vector<GroundElement>> multi_ramsey_search(const std::vector<Coloring>& fs, std::size_t m,
                                                              const RamseySearchOptions& options = {});

/// Independent checkers enumerating every subset or tuple of Y.
bool verify_monochromatic(const Coloring& f, const std::vector<GroundElement>& Y);
bool verify_pattern_monochromatic(const Coloring& f, const std::vector<GroundElement>& Y);
bool verify_pattern_monochromatic(const std::vector<Coloring>& fs, const std::vector<GroundElement>& Y);

/// Number of k-colorings of the n-subsets of {0..N-1} without a monochromatic
/// m-subset, by exhaustive enumeration. Throws CapExceeded past `cap` colorings.
std::uint64_t count_ramsey_counterexamples(std::uint32_t k, std::size_t n, std::size_t m, std::size_t N,
                                           std::uint64_t cap = enumeration_cap());

/// Least N such that every k-coloring of [N]^n has a monochromatic m-subset,
/// found by exhausting colorings for N = m, m+1, ... For n = 1 the colorings
/// are enumerated up to relabeling of points (color-class histograms).
std::uint64_t ramsey_number_bruteforce(std::uint32_t k, std::size_t n, std::size_t m,
                                       std::uint64_t cap = enumeration_cap());

/// Upper bounds; the try_ forms return nullopt when the bound exceeds 2^64 - 1,
/// the others throw OverflowError.
std::optional<std::uint64_t> try_ramsey_upper_bound(std::uint64_t k, std::uint64_t n, std::uint64_t m);
std::optional<std::uint64_t> try_rstar_bound(std::uint64_t k, std::uint64_t n, std::uint64_t m);
std::optional<std::uint64_t> try_rstarstar_bound(std::uint64_t k, const std::vector<std::uint64_t>& arities,
                                                 std::uint64_t m);
std::uint64_t ramsey_upper_bound(std::uint64_t k, std::uint64_t n, std::uint64_t m);
std::uint64_t rstar_bound(std::uint64_t k, std::uint64_t n, std::uint64_t m);
std::uint64_t rstarstar_bound(std::uint64_t k, const std::vector<std::uint64_t>& arities, std::uint64_t m);

}  // namespace msk
