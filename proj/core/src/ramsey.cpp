#include "msortkit/ramsey.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <unordered_map>

#include "msortkit/checked.hpp"
#include "msortkit/error.hpp"

namespace msk {

Pattern pattern_of(std::span<const GroundElement> x) {
  std::vector<GroundElement> values(x.begin(), x.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  Pattern p;
  p.reserve(x.size());
  for (GroundElement v : x)
    p.push_back(static_cast<std::uint32_t>(std::lower_bound(values.begin(), values.end(), v) - values.begin()));
  return p;
}

std::uint64_t pattern_code(const Pattern& p) {
  std::uint64_t code = 0;
  for (std::uint32_t label : p) code = code * p.size() + label;
  return code;
}

std::uint64_t fubini(std::size_t n) {
  // a(n) = sum_{j=1..n} C(n, j) a(n - j): choose the block of smallest values.
  std::vector<std::uint64_t> a{1};
  for (std::size_t i = 1; i <= n; ++i) {
    std::uint64_t total = 0;
    for (std::size_t j = 1; j <= i; ++j) {
      auto c = checked_binomial(i, j);
      auto term = c ? checked_mul(*c, a[i - j]) : std::nullopt;
      auto sum = term ? checked_add(total, *term) : std::nullopt;
      if (!sum) throw OverflowError("fubini(" + std::to_string(n) + ") does not fit in 64 bits");
      total = *sum;
    }
    a.push_back(total);
  }
  return a[n];
}

// ---------------------------------------------------------------------------
// Colorings
// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Coloring::Function hashed(std::uint32_t colors, std::uint64_t seed) {
  return [colors, seed](std::span<const GroundElement> args) {
    std::uint64_t h = splitmix(seed);
    for (GroundElement x : args) h = splitmix(h ^ splitmix(x));
    return static_cast<std::uint32_t>(h % colors) + 1;
  };
}

}  // namespace

Coloring::Coloring(Mode mode, std::size_t arity, std::uint32_t colors, GroundElement ground, Function f)
    : mode_(mode), arity_(arity), colors_(colors), ground_(ground), f_(std::move(f)) {
  if (arity == 0) throw Error("coloring arity must be at least 1");
  if (colors == 0) throw Error("coloring needs at least one color");
}

Coloring Coloring::subsets(std::size_t arity, std::uint32_t colors, GroundElement ground, Function f) {
  return Coloring(Mode::Subsets, arity, colors, ground, std::move(f));
}

Coloring Coloring::tuples(std::size_t arity, std::uint32_t colors, GroundElement ground, Function f) {
  return Coloring(Mode::Tuples, arity, colors, ground, std::move(f));
}

Coloring Coloring::random_subsets(std::size_t arity, std::uint32_t colors, GroundElement ground, std::uint64_t seed) {
  return subsets(arity, colors, ground, hashed(colors, seed));
}

Coloring Coloring::random_tuples(std::size_t arity, std::uint32_t colors, GroundElement ground, std::uint64_t seed) {
  return tuples(arity, colors, ground, hashed(colors, seed));
}

Coloring Coloring::constant(Mode mode, std::size_t arity, std::uint32_t colors, GroundElement ground,
                            std::uint32_t color) {
  return Coloring(mode, arity, colors, ground, [color](std::span<const GroundElement>) { return color; });
}

std::uint32_t Coloring::color(std::span<const GroundElement> args) const {
  if (args.size() != arity_) throw Error("coloring applied to a tuple of the wrong length");
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] >= ground_) throw Error("coloring argument outside the ground set");
    if (mode_ == Mode::Subsets && i > 0 && args[i - 1] >= args[i])
      throw Error("subset coloring needs strictly increasing arguments");
  }
  std::uint32_t c = f_(args);
  if (c < 1 || c > colors_) throw Error("coloring returned color " + std::to_string(c) + " outside [1, k]");
  return c;
}

// ---------------------------------------------------------------------------
// Verifiers
// ---------------------------------------------------------------------------

namespace {

bool valid_witness(const std::vector<GroundElement>& Y, GroundElement ground) {
  for (std::size_t i = 0; i < Y.size(); ++i) {
    if (Y[i] >= ground || (i > 0 && Y[i - 1] >= Y[i])) return false;
  }
  return true;
}

// Calls visit(indices) for every increasing index sequence of length n < size.
template <typename F>
void for_each_combination(std::size_t size, std::size_t n, F&& visit) {
  if (n > size) return;
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (;;) {
    visit(idx);
    std::size_t i = n;
    while (i > 0 && idx[i - 1] == size - n + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

bool verify_monochromatic(const Coloring& f, const std::vector<GroundElement>& Y) {
  if (f.mode() != Coloring::Mode::Subsets || !valid_witness(Y, f.ground())) return false;
  std::optional<std::uint32_t> seen;
  bool ok = true;
  std::vector<GroundElement> args(f.arity());
  for_each_combination(Y.size(), f.arity(), [&](const std::vector<std::size_t>& idx) {
    for (std::size_t i = 0; i < idx.size(); ++i) args[i] = Y[idx[i]];
    std::uint32_t c = f(args);
    if (seen && *seen != c) ok = false;
    seen = c;
  });
  return ok;
}

bool verify_pattern_monochromatic(const std::vector<Coloring>& fs, const std::vector<GroundElement>& Y) {
  for (const Coloring& f : fs) {
    if (f.mode() != Coloring::Mode::Tuples || !valid_witness(Y, f.ground())) return false;
    if (Y.empty()) continue;
    std::map<Pattern, std::uint32_t> colors;
    const std::size_t n = f.arity();
    std::vector<std::size_t> idx(n, 0);
    std::vector<GroundElement> args(n);
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) args[i] = Y[idx[i]];
      std::uint32_t c = f(args);
      auto [it, inserted] = colors.emplace(pattern_of(args), c);
      if (!inserted && it->second != c) return false;
      std::size_t i = n;
      bool done = true;
      while (i > 0) {
        --i;
        if (++idx[i] < Y.size()) {
          done = false;
          break;
        }
        idx[i] = 0;
      }
      if (done) break;
    }
  }
  return true;
}

bool verify_pattern_monochromatic(const Coloring& f, const std::vector<GroundElement>& Y) {
  return verify_pattern_monochromatic(std::vector<Coloring>{f}, Y);
}

// ---------------------------------------------------------------------------
// Searches
// ---------------------------------------------------------------------------

namespace {

// Depth-first search over increasing sequences. Each coloring contributes
// color classes (a single class in subset mode, one per pattern in tuple
// mode) that must stay monochromatic as elements are added.
class WitnessSearch {
 public:
  WitnessSearch(const std::vector<const Coloring*>& fs, std::size_t m, const RamseySearchOptions& options)
      : fs_(fs), m_(m), options_(options), classes_(fs.size()) {
    ground_ = fs.front()->ground();
    for (const Coloring* f : fs) {
      if (f->ground() != ground_) throw Error("colorings must share one ground set");
    }
  }

  std::optional<std::vector<GroundElement>> run() {
    if (m_ > ground_) return std::nullopt;
    if (dfs()) return Y_;
    return std::nullopt;
  }

 private:
  bool dfs() {
    if (Y_.size() == m_) return true;
    const std::uint64_t need = m_ - Y_.size();
    for (GroundElement y = Y_.empty() ? 0 : Y_.back() + 1; ground_ - y >= need; ++y) {
      if (++nodes_ > options_.node_cap)
        throw CapExceeded("Ramsey search exceeded its cap of " + std::to_string(options_.node_cap) + " nodes");
      Y_.push_back(y);
      std::vector<std::pair<std::size_t, std::uint64_t>> added;
      if (extend(added) && dfs()) return true;
      for (const auto& [c, key] : added) classes_[c].erase(key);
      Y_.pop_back();
    }
    return false;
  }

  bool record(std::size_t c, std::uint64_t key, std::uint32_t color,
              std::vector<std::pair<std::size_t, std::uint64_t>>& added) {
    auto [it, inserted] = classes_[c].emplace(key, color);
    if (inserted) {
      added.emplace_back(c, key);
      return true;
    }
    return it->second == color;
  }

  // Checks every subset or tuple that uses the newest element.
  bool extend(std::vector<std::pair<std::size_t, std::uint64_t>>& added) {
    const std::size_t j = Y_.size();
    for (std::size_t c = 0; c < fs_.size(); ++c) {
      const Coloring& f = *fs_[c];
      const std::size_t n = f.arity();
      std::vector<GroundElement> args(n);
      if (f.mode() == Coloring::Mode::Subsets) {
        if (n > j) continue;
        bool ok = true;
        for_each_combination(j - 1, n - 1, [&](const std::vector<std::size_t>& idx) {
          if (!ok) return;
          for (std::size_t i = 0; i + 1 < n; ++i) args[i] = Y_[idx[i]];
          args[n - 1] = Y_.back();
          ok = record(c, 0, f(args), added);
        });
        if (!ok) return false;
        continue;
      }
      std::vector<std::size_t> idx(n, 0);
      for (;;) {
        if (std::find(idx.begin(), idx.end(), j - 1) != idx.end()) {
          // Y is increasing, so positions in Y realize the same pattern as values.
          std::vector<GroundElement> positions(idx.begin(), idx.end());
          for (std::size_t i = 0; i < n; ++i) args[i] = Y_[idx[i]];
          if (!record(c, pattern_code(pattern_of(positions)), f(args), added)) return false;
        }
        std::size_t i = n;
        bool done = true;
        while (i > 0) {
          --i;
          if (++idx[i] < j) {
            done = false;
            break;
          }
          idx[i] = 0;
        }
        if (done) break;
      }
    }
    return true;
  }

  std::vector<const Coloring*> fs_;
  std::size_t m_;
  RamseySearchOptions options_;
  GroundElement ground_ = 0;
  std::vector<GroundElement> Y_;
  std::vector<std::unordered_map<std::uint64_t, std::uint32_t>> classes_;
  std::uint64_t nodes_ = 0;
};

// Pigeonhole fast path for unary subset colorings: bucket the ground set by color.
std::optional<std::vector<GroundElement>> unary_search(const Coloring& f, std::size_t m,
                                                       const RamseySearchOptions& options) {
  if (m > f.ground()) return std::nullopt;
  if (f.ground() > options.node_cap)
    throw CapExceeded("Ramsey search exceeded its cap of " + std::to_string(options.node_cap) + " nodes");
  std::map<std::uint32_t, std::vector<GroundElement>> buckets;
  for (GroundElement x = 0; x < f.ground(); ++x) {
    std::array<GroundElement, 1> arg{x};
    auto& b = buckets[f(arg)];
    if (b.size() < m) b.push_back(x);
  }
  std::optional<std::vector<GroundElement>> best;
  for (auto& [color, b] : buckets) {
    if (b.size() == m && (!best || b < *best)) best = b;
  }
  if (m == 0) best = std::vector<GroundElement>{};
  return best;
}

[[noreturn]] void verification_failed() {
  throw Error("internal error: Ramsey witness failed independent verification");
}

}  // namespace

std::optional<std::vector<GroundElement>> ramsey_search(const Coloring& f, std::size_t m,
                                                        const RamseySearchOptions& options) {
  if (f.mode() != Coloring::Mode::Subsets) throw Error("classic Ramsey search needs a subset coloring");
  auto Y = f.arity() == 1 ? unary_search(f, m, options) : WitnessSearch({&f}, m, options).run();
  if (Y && !verify_monochromatic(f, *Y)) verification_failed();
  return Y;
}

std::optional<std::vector<GroundElement>> directed_ramsey_search(const Coloring& f, std::size_t m,
                                                                 const RamseySearchOptions& options) {
  return multi_ramsey_search({f}, m, options);
}

std::optional<std::vector<GroundElement>> multi_ramsey_search(const std::vector<Coloring>& fs, std::size_t m,
                                                              const RamseySearchOptions& options) {
  if (fs.empty()) throw Error("multi Ramsey search needs at least one coloring");
  std::vector<const Coloring*> ptrs;
  for (const Coloring& f : fs) {
    if (f.mode() != Coloring::Mode::Tuples) throw Error("pattern Ramsey search needs tuple colorings");
    ptrs.push_back(&f);
  }
  auto Y = WitnessSearch(ptrs, m, options).run();
  if (Y && !verify_pattern_monochromatic(fs, *Y)) verification_failed();
  return Y;
}

// ---------------------------------------------------------------------------
// Brute-force Ramsey numbers
// ---------------------------------------------------------------------------

std::uint64_t count_ramsey_counterexamples(std::uint32_t k, std::size_t n, std::size_t m, std::size_t N,
                                           std::uint64_t cap) {
  if (k == 0 || n == 0) throw Error("need k >= 1 and n >= 1");
  std::map<std::vector<std::size_t>, std::size_t> rank;
  for_each_combination(N, n, [&](const std::vector<std::size_t>& idx) { rank.emplace(idx, rank.size()); });
  const std::size_t cells = rank.size();
  auto total = checked_pow(k, cells);
  if (!total || *total > cap)
    throw CapExceeded("exhausting " + std::to_string(k) + "^" + std::to_string(cells) +
                      " colorings exceeds the cap of " + std::to_string(cap));

  // For each m-subset, the ranks of its n-subsets.
  std::vector<std::vector<std::size_t>> groups;
  for_each_combination(N, m, [&](const std::vector<std::size_t>& big) {
    std::vector<std::size_t> members;
    for_each_combination(m, n, [&](const std::vector<std::size_t>& sub) {
      std::vector<std::size_t> key;
      for (std::size_t i : sub) key.push_back(big[i]);
      members.push_back(rank.at(key));
    });
    groups.push_back(std::move(members));
  });

  std::vector<std::uint32_t> color(cells, 0);
  std::uint64_t bad = 0;
  for (std::uint64_t it = 0; it < *total; ++it) {
    bool found = false;
    for (const auto& g : groups) {
      bool mono = true;
      for (std::size_t r : g) {
        if (color[r] != color[g.front()]) {
          mono = false;
          break;
        }
      }
      if (mono) {
        found = true;
        break;
      }
    }
    if (!found) ++bad;
    for (std::size_t i = cells; i-- > 0;) {
      if (++color[i] < k) break;
      color[i] = 0;
    }
  }
  return bad;
}

namespace {

// Some k-coloring of N points avoids m points of one color iff the color-class
// sizes can all stay below m; decided over histograms.
bool unary_counterexample_exists(std::uint32_t k, std::size_t m, std::uint64_t N, std::uint64_t cap) {
  auto work = checked_mul(static_cast<std::uint64_t>(k) * m, N + 1);
  if (!work || *work > cap) throw CapExceeded("histogram enumeration exceeds the cap");
  std::vector<bool> reach(N + 1, false);
  reach[0] = true;
  for (std::uint32_t c = 0; c < k; ++c) {
    std::vector<bool> next(N + 1, false);
    for (std::uint64_t s = 0; s <= N; ++s) {
      if (!reach[s]) continue;
      for (std::uint64_t size = 0; size < m && s + size <= N; ++size) next[s + size] = true;
    }
    reach = std::move(next);
  }
  return reach[N];
}

}  // namespace

std::uint64_t ramsey_number_bruteforce(std::uint32_t k, std::size_t n, std::size_t m, std::uint64_t cap) {
  if (k == 0 || n == 0) throw Error("need k >= 1 and n >= 1");
  if (m <= n || k == 1) return m;
  if (n == 1) {
    std::uint64_t lo = m;  // a counterexample exists below lo's predecessor or lo is the answer
    std::uint64_t hi = m;
    while (unary_counterexample_exists(k, m, hi, cap)) {
      lo = hi + 1;
      hi *= 2;
    }
    while (lo < hi) {
      std::uint64_t mid = lo + (hi - lo) / 2;
      if (unary_counterexample_exists(k, m, mid, cap)) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo;
  }
  std::uint64_t budget = cap;
  for (std::size_t N = m;; ++N) {
    auto cells = checked_binomial(N, n);
    auto total = cells ? checked_pow(k, *cells) : std::nullopt;
    if (!total || *total > budget)
      throw CapExceeded("brute-force Ramsey search exceeds the cap of " + std::to_string(cap) + " colorings");
    if (count_ramsey_counterexamples(k, n, m, N, budget) == 0) return N;
    budget -= *total;
  }
}

}  // namespace msk
