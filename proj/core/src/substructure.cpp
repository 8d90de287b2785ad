#include <algorithm>

#include "msortkit/semantics.hpp"

namespace msk {

Substructure generated_substructure(const Structure& A, const std::vector<std::set<Element>>& seeds) {
  const Signature& sig = A.signature();
  const std::size_t nsorts = sig.sort_count();
  if (seeds.size() != nsorts) throw EvalError("seed sets must be given for every sort");

  std::vector<std::vector<bool>> member(nsorts);
  std::vector<std::vector<Element>> elems(nsorts);
  for (std::size_t s = 0; s < nsorts; ++s) {
    member[s].assign(A.size(s), false);
    for (Element e : seeds[s]) {
      if (e >= A.size(s)) throw EvalError("seed " + element_name(e) + " outside the domain of " + sig.sorts()[s].name);
      if (!member[s][e]) {
        member[s][e] = true;
        elems[s].push_back(e);
      }
    }
  }

  // Close under every function until nothing new appears.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t f = 0; f < sig.functions().size(); ++f) {
      const auto& args = A.function_args(f);
      const std::size_t result = A.function_result(f);
      bool empty = false;
      for (std::size_t s : args) empty = empty || elems[s].empty();
      if (empty) continue;
      std::vector<std::size_t> pos(args.size(), 0);
      std::vector<Element> tuple(args.size());
      for (;;) {
        for (std::size_t i = 0; i < args.size(); ++i) tuple[i] = elems[args[i]][pos[i]];
        Element v = A.apply(f, tuple);
        if (!member[result][v]) {
          member[result][v] = true;
          elems[result].push_back(v);
          changed = true;
        }
        std::size_t i = args.size();
        bool done = true;
        while (i > 0) {
          --i;
          if (++pos[i] < elems[args[i]].size()) {
            done = false;
            break;
          }
          pos[i] = 0;
        }
        if (done) break;
      }
    }
  }

  Embedding emb(nsorts);
  std::vector<std::vector<Element>> to_new(nsorts);
  std::vector<std::size_t> sizes(nsorts);
  for (std::size_t s = 0; s < nsorts; ++s) {
    if (elems[s].empty())
      throw EvalError("generated substructure has an empty domain for sort " + sig.sorts()[s].name);
    to_new[s].assign(A.size(s), 0);
    for (Element e = 0; e < A.size(s); ++e) {
      if (member[s][e]) {
        to_new[s][e] = static_cast<Element>(emb[s].size());
        emb[s].push_back(e);
      }
    }
    sizes[s] = emb[s].size();
  }

  Structure sub(A.signature_ptr(), sizes);
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    const auto& args = sub.function_args(f);
    auto& table = sub.function_table(f);
    for (std::size_t c = 0; c < table.size(); ++c) {
      auto t = sub.decode_cell(args, c);
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = emb[args[i]][t[i]];
      table[c] = to_new[sub.function_result(f)][A.apply(f, t)];
    }
  }
  for (std::size_t p = 0; p < sig.predicates().size(); ++p) {
    const auto& args = sub.predicate_args(p);
    auto& table = sub.predicate_table(p);
    for (std::size_t c = 0; c < table.size(); ++c) {
      auto t = sub.decode_cell(args, c);
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = emb[args[i]][t[i]];
      table[c] = A.holds(p, t) ? 1 : 0;
    }
  }
  return {std::move(sub), std::move(emb)};
}

bool is_substructure(const Structure& A, const Structure& B, const Embedding& emb) {
  const Signature& sig = A.signature();
  if (!(sig == B.signature()) || emb.size() != sig.sort_count()) return false;
  for (std::size_t s = 0; s < sig.sort_count(); ++s) {
    if (emb[s].size() != A.size(s)) return false;
    std::vector<bool> used(B.size(s), false);
    for (Element e : emb[s]) {
      if (e >= B.size(s) || used[e]) return false;
      used[e] = true;
    }
  }
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    const auto& args = A.function_args(f);
    for (std::size_t c = 0; c < A.function_table(f).size(); ++c) {
      auto t = A.decode_cell(args, c);
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = emb[args[i]][t[i]];
      if (B.apply(f, t) != emb[A.function_result(f)][A.function_table(f)[c]]) return false;
    }
  }
  for (std::size_t p = 0; p < sig.predicates().size(); ++p) {
    const auto& args = A.predicate_args(p);
    for (std::size_t c = 0; c < A.predicate_table(p).size(); ++c) {
      auto t = A.decode_cell(args, c);
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = emb[args[i]][t[i]];
      if (B.holds(p, t) != (A.predicate_table(p)[c] != 0)) return false;
    }
  }
  return true;
}

namespace {

// Per-element isomorphism invariants: preimage counts under each function and
// occurrence counts in each predicate position.
std::vector<std::vector<std::vector<std::size_t>>> invariants(const Structure& A) {
  const Signature& sig = A.signature();
  std::vector<std::vector<std::vector<std::size_t>>> inv(sig.sort_count());
  for (std::size_t s = 0; s < sig.sort_count(); ++s) inv[s].assign(A.size(s), {});
  for (std::size_t f = 0; f < sig.functions().size(); ++f) {
    const std::size_t r = A.function_result(f);
    std::vector<std::size_t> pre(A.size(r), 0);
    const auto& table = A.function_table(f);
    const auto& args = A.function_args(f);
    std::vector<std::size_t> fixed(A.size(r), 0);
    for (std::size_t c = 0; c < table.size(); ++c) {
      ++pre[table[c]];
      if (args.size() == 1 && args[0] == r && table[c] == c) fixed[c] = 1;
    }
    for (Element e = 0; e < A.size(r); ++e) {
      inv[r][e].push_back(pre[e]);
      inv[r][e].push_back(fixed[e]);
    }
  }
  for (std::size_t p = 0; p < sig.predicates().size(); ++p) {
    const auto& args = A.predicate_args(p);
    std::vector<std::vector<std::size_t>> count(args.size());
    for (std::size_t q = 0; q < args.size(); ++q) count[q].assign(A.size(args[q]), 0);
    const auto& table = A.predicate_table(p);
    for (std::size_t c = 0; c < table.size(); ++c) {
      if (!table[c]) continue;
      auto t = A.decode_cell(args, c);
      for (std::size_t q = 0; q < t.size(); ++q) ++count[q][t[q]];
    }
    for (std::size_t q = 0; q < args.size(); ++q) {
      for (Element e = 0; e < A.size(args[q]); ++e) inv[args[q]][e].push_back(count[q][e]);
    }
  }
  return inv;
}

class IsoSearch {
 public:
  IsoSearch(const Structure& A, const Structure& B) : A_(A), B_(B), invA_(invariants(A)), invB_(invariants(B)) {
    const std::size_t n = A.signature().sort_count();
    map_.resize(n);
    used_.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
      map_[s].assign(A.size(s), kUnset);
      used_[s].assign(B.size(s), false);
      for (Element e = 0; e < A.size(s); ++e) order_.emplace_back(s, e);
    }
  }

  bool run() {
    for (std::size_t s = 0; s < invA_.size(); ++s) {
      auto a = invA_[s];
      auto b = invB_[s];
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b) return false;
    }
    return extend(0);
  }

 private:
  static constexpr Element kUnset = static_cast<Element>(-1);

  bool extend(std::size_t k) {
    if (k == order_.size()) return true;
    auto [s, e] = order_[k];
    for (Element cand = 0; cand < B_.size(s); ++cand) {
      if (used_[s][cand] || invA_[s][e] != invB_[s][cand]) continue;
      map_[s][e] = cand;
      used_[s][cand] = true;
      if (consistent() && extend(k + 1)) return true;
      used_[s][cand] = false;
      map_[s][e] = kUnset;
    }
    return false;
  }

  bool mapped(const std::vector<std::size_t>& sorts, std::vector<Element>& t) const {
    for (std::size_t i = 0; i < t.size(); ++i) {
      Element m = map_[sorts[i]][t[i]];
      if (m == kUnset) return false;
      t[i] = m;
    }
    return true;
  }

  bool consistent() const {
    const Signature& sig = A_.signature();
    for (std::size_t f = 0; f < sig.functions().size(); ++f) {
      const auto& args = A_.function_args(f);
      const auto& table = A_.function_table(f);
      for (std::size_t c = 0; c < table.size(); ++c) {
        Element v = map_[A_.function_result(f)][table[c]];
        if (v == kUnset) continue;
        auto t = A_.decode_cell(args, c);
        if (mapped(args, t) && B_.apply(f, t) != v) return false;
      }
    }
    for (std::size_t p = 0; p < sig.predicates().size(); ++p) {
      const auto& args = A_.predicate_args(p);
      const auto& table = A_.predicate_table(p);
      for (std::size_t c = 0; c < table.size(); ++c) {
        auto t = A_.decode_cell(args, c);
        if (mapped(args, t) && B_.holds(p, t) != (table[c] != 0)) return false;
      }
    }
    return true;
  }

  const Structure& A_;
  const Structure& B_;
  std::vector<std::vector<std::vector<std::size_t>>> invA_, invB_;
  std::vector<std::vector<Element>> map_;
  std::vector<std::vector<bool>> used_;
  std::vector<std::pair<std::size_t, Element>> order_;
};

}  // namespace

bool isomorphic(const Structure& A, const Structure& B) {
  if (!(A.signature() == B.signature()) || A.sizes() != B.sizes()) return false;
  return IsoSearch(A, B).run();
}

}  // namespace msk
