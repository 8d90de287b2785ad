#include <doctest.h>

#include <random>
#include <set>

#include "msortkit/ramsey.hpp"

using namespace msk;

namespace {

using Tuple = std::vector<GroundElement>;

// x ~ y straight from the definition: same order and equality between every
// pair of positions.
bool similar(const Tuple& x, const Tuple& y) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if ((x[i] < x[j]) != (y[i] < y[j]) || (x[i] == x[j]) != (y[i] == y[j])) return false;
    }
  }
  return true;
}

void for_each_tuple(std::size_t n, GroundElement base, const std::function<void(const Tuple&)>& f) {
  Tuple t(n, 0);
  for (;;) {
    f(t);
    std::size_t i = n;
    while (i > 0 && ++t[i - 1] == base) t[--i] = 0;
    if (i == 0) return;
  }
}

void for_each_subset(GroundElement N, std::size_t m, const std::function<bool(const Tuple&)>& f) {
  Tuple s(m);
  std::function<bool(std::size_t, GroundElement)> rec = [&](std::size_t i, GroundElement from) {
    if (i == m) return f(s);
    for (GroundElement x = from; x < N; ++x) {
      s[i] = x;
      if (!rec(i + 1, x + 1)) return false;
    }
    return true;
  };
  rec(0, 0);
}

// Every n-tuple over Y, grouped by pattern, must have one color per group.
bool pattern_mono_by_hand(const Coloring& f, const Tuple& Y) {
  std::vector<std::pair<Tuple, std::uint32_t>> seen;
  bool ok = true;
  for_each_tuple(f.arity(), Y.size(), [&](const Tuple& idx) {
    Tuple args;
    for (auto i : idx) args.push_back(Y[i]);
    const std::uint32_t c = f(args);
    for (const auto& [other, color] : seen) {
      if (similar(other, args) && color != c) ok = false;
    }
    seen.emplace_back(args, c);
  });
  return ok;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("patterns") {
  CHECK(pattern_of(Tuple{1, 2}) == pattern_of(Tuple{3, 5}));
  CHECK(pattern_of(Tuple{1, 2}) == Pattern{0, 1});
  CHECK(pattern_of(Tuple{5, 3}) == Pattern{1, 0});
  CHECK(pattern_of(Tuple{7, 7}) == Pattern{0, 0});
  CHECK(pattern_of(Tuple{9, 2, 9, 4}) == Pattern{2, 0, 2, 1});

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng() % 5;
    Tuple x(n), y(n);
    for (auto& v : x) v = rng() % 4;
    for (auto& v : y) v = rng() % 4;
    CHECK((pattern_of(x) == pattern_of(y)) == similar(x, y));
  }
}

TEST_CASE("ordered Bell numbers match brute-force pattern counts") {
  for (std::size_t n = 1; n <= 6; ++n) {
    std::set<Pattern> patterns;
    for_each_tuple(n, n, [&](const Tuple& t) { patterns.insert(pattern_of(t)); });
    CHECK(fubini(n) == patterns.size());
  }
  CHECK(fubini(0) == 1);
  // Recurrence a(n) = sum_k C(n,k) a(n-k).
  std::vector<std::uint64_t> a{1};
  for (std::size_t n = 1; n <= 12; ++n) {
    std::uint64_t s = 0;
    for (std::size_t k = 1; k <= n; ++k) s += binomial(n, k) * a[n - k];
    a.push_back(s);
    CHECK(fubini(n) == s);
  }
  CHECK_THROWS_AS(fubini(40), OverflowError);
}

TEST_CASE("colorings validate their input") {
  auto f = Coloring::constant(Coloring::Mode::Subsets, 2, 3, 5);
  CHECK(f(Tuple{0, 1}) == 1);
  CHECK_THROWS(f(Tuple{1, 0}));
  CHECK_THROWS(f(Tuple{0, 5}));
  CHECK_THROWS(f(Tuple{0}));
  auto bad = Coloring::tuples(1, 2, 4, [](std::span<const GroundElement>) { return 3u; });
  CHECK_THROWS(bad(Tuple{0}));
  auto g = Coloring::random_tuples(2, 4, 10, 1);
  CHECK(g(Tuple{3, 3}) == g(Tuple{3, 3}));
}

TEST_CASE("classic search") {
  SUBCASE("901 pigeons, 100 holes") {
    auto f = Coloring::random_subsets(1, 100, 901, 5);
    auto Y = ramsey_search(f, 10);
    REQUIRE(Y);
    CHECK(Y->size() == 10);
    CHECK(verify_monochromatic(f, *Y));
  }
  SUBCASE("900 pigeons, nine per hole") {
    auto f = Coloring::subsets(1, 100, 900, [](std::span<const GroundElement> x) {
      return static_cast<std::uint32_t>(x[0] / 9 + 1);
    });
    CHECK_FALSE(ramsey_search(f, 10));
  }
  SUBCASE("agrees with exhaustive subset search") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      auto f = Coloring::random_subsets(2, 2, 7, seed);
      std::optional<Tuple> first;
      for_each_subset(7, 4, [&](const Tuple& Y) {
        if (verify_monochromatic(f, Y)) first = Y;
        return !first;
      });
      CHECK(ramsey_search(f, 4) == first);
    }
  }
}

TEST_CASE("directed and multi search") {
  SUBCASE("strict order coloring") {
    auto f = Coloring::tuples(2, 2, 6, [](std::span<const GroundElement> x) { return x[0] < x[1] ? 1u : 2u; });
    auto Y = directed_ramsey_search(f, 2);
    REQUIRE(Y);
    CHECK(*Y == Tuple{0, 1});
    CHECK_FALSE(verify_monochromatic(Coloring::subsets(1, 2, 6, [](auto x) { return x[0] % 2 ? 1u : 2u; }),
                                     Tuple{0, 1}));
  }
  SUBCASE("constant colorings give the first m elements") {
    auto f = Coloring::constant(Coloring::Mode::Tuples, 3, 2, 10);
    CHECK(directed_ramsey_search(f, 4) == Tuple{0, 1, 2, 3});
    auto g = Coloring::constant(Coloring::Mode::Tuples, 1, 2, 10, 2);
    CHECK(multi_ramsey_search({f, g}, 3) == Tuple{0, 1, 2});
  }
  SUBCASE("independent verification on random colorings") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      auto f = Coloring::random_tuples(2, 2, 40, seed);
      auto Y = directed_ramsey_search(f, 3);
      if (Y) CHECK(pattern_mono_by_hand(f, *Y));
      auto g = Coloring::random_tuples(1, 2, 40, seed + 1000);
      auto Z = multi_ramsey_search({g, f}, 2);
      REQUIRE(Z);
      CHECK(pattern_mono_by_hand(f, *Z));
      CHECK(pattern_mono_by_hand(g, *Z));
      CHECK(multi_ramsey_search({f}, 3) == Y);
    }
  }
  SUBCASE("misuse") {
    CHECK_THROWS(multi_ramsey_search({}, 2));
    CHECK_THROWS(directed_ramsey_search(Coloring::constant(Coloring::Mode::Subsets, 2, 2, 5), 2));
  }
}

TEST_CASE("brute-force Ramsey numbers") {
  CHECK(ramsey_number_bruteforce(2, 1, 2) == 3);
  CHECK(ramsey_number_bruteforce(100, 1, 10) == 100 * 9 + 1);
  CHECK(ramsey_number_bruteforce(3, 1, 4) == 3 * 3 + 1);
  CHECK(count_ramsey_counterexamples(2, 2, 3, 5) > 0);
  CHECK(count_ramsey_counterexamples(2, 2, 3, 6) == 0);
  // The pentagon and its complement are the only good colorings of K5 up to
  // relabeling; there are 12 labeled copies.
  CHECK(count_ramsey_counterexamples(2, 2, 3, 5) == 12);
  CHECK(ramsey_number_bruteforce(2, 2, 3) == 6);
}

TEST_CASE("upper bounds") {
  for (std::uint64_t k = 1; k <= 5; ++k) {
    for (std::uint64_t m = 2; m <= 6; ++m) CHECK(ramsey_upper_bound(k, 1, m) == k * (m - 1) + 1);
  }
  CHECK(ramsey_upper_bound(1, 3, 7) == 7);
  CHECK(ramsey_upper_bound(2, 2, 3) >= ramsey_number_bruteforce(2, 2, 3));
  CHECK(ramsey_upper_bound(2, 1, 3) >= ramsey_number_bruteforce(2, 1, 3));

  CHECK(rstar_bound(3, 1, 4) == ramsey_upper_bound(3, 1, 4));
  CHECK(try_rstar_bound(2, 2, 2) == try_ramsey_upper_bound(16, 2, 3));
  CHECK(try_rstarstar_bound(2, {1, 2}, 2) == try_rstar_bound(4, 3, 3));
  CHECK(try_rstarstar_bound(3, {2}, 2) == try_rstar_bound(3, 2, 3));
  CHECK(rstarstar_bound(5, {1}, 2) == rstar_bound(5, 1, 3));
  CHECK(rstarstar_bound(5, {1}, 2) == 5 * 2 + 1);
  CHECK_FALSE(try_rstarstar_bound(2, {1, 2}, 2));
  CHECK_THROWS_AS(rstarstar_bound(2, {1, 2}, 2), OverflowError);
}

TEST_CASE("bounds are large enough for small random colorings") {
  const std::uint64_t N = ramsey_upper_bound(2, 2, 3);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto f = Coloring::random_subsets(2, 2, N, seed);
    auto Y = ramsey_search(f, 3);
    REQUIRE(Y);
    CHECK(verify_monochromatic(f, *Y));
  }
}
