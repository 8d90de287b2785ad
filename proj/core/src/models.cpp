#include <algorithm>
#include <thread>

#include "msortkit/checked.hpp"
#include "msortkit/semantics.hpp"

namespace msk {

void TheoryDef::validate() const {
  if (!signature) throw SignatureError("theory has no signature");
  for (const auto& ax : axioms) {
    sort_check(*ax, *signature);
    if (!is_sentence(*ax)) throw SortError("axiom is not a sentence: " + to_string(*ax));
  }
  if (designated) {
    for (const Sort& s : *designated) {
      if (!signature->has_sort(s)) throw SortError("designated sort '" + s.name + "' is undeclared");
    }
  }
}

TheoryDef theory_from_document(const Document& doc) {
  TheoryDef T{std::make_shared<const Signature>(doc.signature), doc.assertions, std::nullopt};
  T.validate();
  return T;
}

bool satisfies_theory(const Structure& A, const TheoryDef& T) {
  return std::all_of(T.axioms.begin(), T.axioms.end(),
                     [&](const FormulaPtr& ax) { return satisfies(A, *ax); });
}

SizeBounds SizeBounds::uniform(std::size_t sort_count, std::size_t max_size) {
  return {SizeTuple(sort_count, 1), SizeTuple(sort_count, max_size)};
}

SizeBounds SizeBounds::exactly(const SizeTuple& sizes) { return {sizes, sizes}; }

std::vector<SizeTuple> size_profiles(const SizeBounds& bounds) {
  const std::size_t n = bounds.lo.size();
  if (bounds.hi.size() != n) throw Error("size bounds of different lengths");
  std::vector<SizeTuple> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (bounds.lo[i] == 0) throw EvalError("domain sizes must be at least 1");
    if (bounds.lo[i] > bounds.hi[i]) return out;
  }
  SizeTuple cur = bounds.lo;
  for (bool more = true; more;) {
    out.push_back(cur);
    more = false;
    for (std::size_t i = n; i-- > 0;) {
      if (++cur[i] <= bounds.hi[i]) {
        more = true;
        break;
      }
      cur[i] = bounds.lo[i];
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const SizeTuple& a, const SizeTuple& b) {
    std::size_t sa = 0, sb = 0;
    for (auto x : a) sa += x;
    for (auto x : b) sb += x;
    if (sa != sb) return sa < sb;
    return a < b;
  });
  return out;
}

namespace {

// Odometer over the concatenated tables of a structure.
class TableOdometer {
 public:
  TableOdometer(Structure& A) : A_(A) {
    const Signature& sig = A.signature();
    for (std::size_t f = 0; f < sig.functions().size(); ++f) {
      const std::size_t radix = A.size(A.function_result(f));
      for (std::size_t c = 0; c < A.function_table(f).size(); ++c) cells_.push_back({true, f, c, radix});
    }
    for (std::size_t p = 0; p < sig.predicates().size(); ++p) {
      for (std::size_t c = 0; c < A.predicate_table(p).size(); ++c) cells_.push_back({false, p, c, 2});
    }
    digits_.assign(cells_.size(), 0);
  }

  /// Total number of structures, or nullopt if it does not fit in 64 bits.
  std::optional<std::uint64_t> total() const {
    std::uint64_t n = 1;
    for (const auto& c : cells_) {
      auto m = checked_mul(n, c.radix);
      if (!m) return std::nullopt;
      n = *m;
    }
    return n;
  }

  void seek(std::uint64_t index) {
    for (std::size_t i = cells_.size(); i-- > 0;) {
      digits_[i] = static_cast<Element>(index % cells_[i].radix);
      index /= cells_[i].radix;
      write(i);
    }
  }

  /// Advances to the next structure; false once every table has wrapped.
  bool next() {
    std::size_t i = cells_.size();
    while (i > 0) {
      --i;
      if (++digits_[i] < cells_[i].radix) {
        write(i);
        return true;
      }
      digits_[i] = 0;
      write(i);
    }
    return false;
  }

 private:
  struct Cell {
    bool function;
    std::size_t table;
    std::size_t cell;
    std::size_t radix;
  };

  void write(std::size_t i) {
    const Cell& c = cells_[i];
    if (c.function) {
      A_.function_table(c.table)[c.cell] = digits_[i];
    } else {
      A_.predicate_table(c.table)[c.cell] = static_cast<std::uint8_t>(digits_[i]);
    }
  }

  Structure& A_;
  std::vector<Cell> cells_;
  std::vector<Element> digits_;
};

struct AxiomChecker {
  std::vector<CompiledFormula> compiled;
  mutable std::vector<Element> env;

  explicit AxiomChecker(const TheoryDef& T) {
    std::size_t slots = 0;
    for (const auto& ax : T.axioms) {
      compiled.emplace_back(*ax, *T.signature);
      slots = std::max(slots, compiled.back().slot_count());
    }
    env.assign(slots, 0);
  }

  bool operator()(const Structure& A) const {
    for (const auto& c : compiled) {
      if (!c.eval(A, env)) return false;
    }
    return true;
  }
};

[[noreturn]] void cap_exceeded(std::uint64_t cap) {
  throw CapExceeded("enumeration cap of " + std::to_string(cap) +
                    " structures exceeded (set MSORT_CAP to raise it)");
}

// Visits structures [start, start + count) of the canonical order; count may be
// unbounded. Returns the number visited.
std::uint64_t run_range(const TheoryDef& T, const SizeTuple& sizes, std::uint64_t start,
                        std::optional<std::uint64_t> count, std::uint64_t limit,
                        const std::function<bool(const Structure&)>& visit,
                        std::optional<std::uint64_t> reported_cap = std::nullopt) {
  Structure A(T.signature, sizes);
  TableOdometer odo(A);
  AxiomChecker axioms(T);
  if (start) odo.seek(start);
  std::uint64_t visited = 0;
  for (;;) {
    if (count && visited == *count) break;
    if (++visited > limit) cap_exceeded(reported_cap.value_or(limit));
    if (axioms(A) && !visit(A)) break;
    if (!odo.next()) break;
  }
  return visited;
}

}  // namespace

std::uint64_t for_each_model(const TheoryDef& T, const SizeTuple& sizes,
                             const std::function<bool(const Structure&)>& visit,
                             const EnumerationOptions& options) {
  if (!options.dedup_isomorphic) return run_range(T, sizes, 0, std::nullopt, options.cap, visit);
  std::vector<Structure> seen;
  return run_range(T, sizes, 0, std::nullopt, options.cap, [&](const Structure& A) {
    for (const auto& B : seen) {
      if (isomorphic(A, B)) return true;
    }
    seen.push_back(A);
    return visit(A);
  });
}

std::vector<Structure> enumerate_models(const TheoryDef& T, const SizeTuple& sizes,
                                        const EnumerationOptions& options) {
  std::vector<Structure> out;
  std::optional<std::uint64_t> total;
  if (options.jobs > 1) {
    Structure probe(T.signature, sizes);
    total = TableOdometer(probe).total();
  }
  if (options.jobs <= 1 || !total || *total > options.cap || *total < options.jobs) {
    for_each_model(T, sizes, [&](const Structure& A) {
      out.push_back(A);
      return true;
    }, options);
    return out;
  }

  // Contiguous slices of the canonical order, concatenated in slice order.
  const std::uint64_t jobs = options.jobs;
  std::vector<std::vector<Structure>> parts(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> workers;
  for (std::uint64_t j = 0; j < jobs; ++j) {
    const std::uint64_t begin = *total / jobs * j + std::min(j, *total % jobs);
    const std::uint64_t len = *total / jobs + (j < *total % jobs ? 1 : 0);
    workers.emplace_back([&, j, begin, len] {
      try {
        run_range(T, sizes, begin, len, options.cap, [&](const Structure& A) {
          parts[j].push_back(A);
          return true;
        });
      } catch (...) {
        errors[j] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& p : parts) {
    for (auto& A : p) {
      if (options.dedup_isomorphic &&
          std::any_of(out.begin(), out.end(), [&](const Structure& B) { return isomorphic(A, B); }))
        continue;
      out.push_back(std::move(A));
    }
  }
  return out;
}

std::vector<Structure> enumerate_models(const TheoryDef& T, const SizeBounds& bounds,
                                        const EnumerationOptions& options) {
  std::vector<Structure> out;
  EnumerationOptions opts = options;
  try {
    for (const auto& sizes : size_profiles(bounds)) {
      std::uint64_t visited = for_each_model(T, sizes, [&](const Structure& A) {
        out.push_back(A);
        return true;
      }, opts);
      opts.cap -= std::min(opts.cap, visited);
    }
  } catch (const CapExceeded&) {
    cap_exceeded(options.cap);
  }
  return out;
}

std::optional<SatWitness> check_sat(const TheoryDef& T, const Formula& phi, const SizeBounds& bounds,
                                    const EnumerationOptions& options) {
  const std::vector<Variable> vars = free_vars(phi).variables();
  CompiledFormula compiled(phi, *T.signature, vars);
  std::vector<Element> env(compiled.slot_count(), 0);
  std::optional<SatWitness> result;
  std::uint64_t remaining = options.cap;
  for (const auto& sizes : size_profiles(bounds)) {
    std::vector<std::size_t> limits;
    for (const auto& v : vars) limits.push_back(sizes[T.signature->sort_index(v.sort)]);
    std::uint64_t visited = run_range(T, sizes, 0, std::nullopt, remaining, [&](const Structure& A) {
      std::fill(env.begin(), env.end(), 0);
      for (;;) {
        if (compiled.eval(A, env)) {
          Assignment nu;
          for (std::size_t i = 0; i < vars.size(); ++i) nu[vars[i]] = env[i];
          result = SatWitness{A, std::move(nu)};
          return false;
        }
        std::size_t i = vars.size();
        bool wrapped = true;
        while (i > 0) {
          --i;
          if (++env[i] < limits[i]) {
            wrapped = false;
            break;
          }
          env[i] = 0;
        }
        if (wrapped) return true;
      }
    }, options.cap);
    if (result) return result;
    remaining -= std::min(remaining, visited);
  }
  return std::nullopt;
}

std::optional<SatWitness> check_sat(const TheoryDef& T, const Formula& phi, std::size_t bound,
                                    const EnumerationOptions& options) {
  return check_sat(T, phi, SizeBounds::uniform(T.signature->sort_count(), bound), options);
}

}  // namespace msk
