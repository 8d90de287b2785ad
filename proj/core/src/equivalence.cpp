// Bounded elementary equivalence via Hintikka types.
//
// The rank-r type of a tuple of elements records which atoms hold for it
// (atoms over terms up to a fixed depth) and, for every sort that still has
// variable budget, the set of rank-(r-1) types of its one-element extensions.
// Two tuples with the same shape satisfy the same formulas of rank <= r in the
// available variables exactly when their rank-r types are equal.

#include <algorithm>
#include <map>

#include "msortkit/semantics.hpp"

namespace msk {
namespace {

struct SymTerm {
  bool is_var = false;
  std::size_t index = 0;  // variable position or function index
  std::vector<std::size_t> args;
  std::size_t sort = 0;
};

struct Atom {
  bool is_equality = false;
  std::size_t pred = 0;
  std::vector<std::size_t> terms;
};

struct AtomTable {
  std::vector<SymTerm> terms;
  std::vector<Atom> atoms;
};

class TypeBuilder {
 public:
  TypeBuilder(const Signature& sig, std::vector<std::size_t> budget, const EquivalenceOptions& options)
      : sig_(sig), budget_(std::move(budget)), options_(options) {}

  std::uint32_t type(const Structure& A, std::vector<std::size_t>& shape, std::vector<Element>& values,
                     std::size_t rank) {
    const AtomTable& table = atoms_for(shape);
    std::vector<std::uint64_t> key;
    key.push_back(rank);
    key.push_back(shape.size());
    for (std::size_t s : shape) key.push_back(s);
    key.push_back(kSeparator);

    std::vector<Element> term_values(table.terms.size());
    for (std::size_t i = 0; i < table.terms.size(); ++i) {
      const SymTerm& t = table.terms[i];
      if (t.is_var) {
        term_values[i] = values[t.index];
      } else {
        std::vector<Element> args;
        for (std::size_t a : t.args) args.push_back(term_values[a]);
        term_values[i] = A.apply(t.index, args);
      }
    }
    std::uint64_t word = 0;
    std::size_t bit = 0;
    for (const Atom& atom : table.atoms) {
      bool holds;
      if (atom.is_equality) {
        holds = term_values[atom.terms[0]] == term_values[atom.terms[1]];
      } else {
        std::vector<Element> args;
        for (std::size_t t : atom.terms) args.push_back(term_values[t]);
        holds = A.holds(atom.pred, args);
      }
      if (holds) word |= std::uint64_t{1} << bit;
      if (++bit == 64) {
        key.push_back(word);
        word = 0;
        bit = 0;
      }
    }
    key.push_back(word);

    if (rank > 0) {
      std::vector<std::size_t> used(sig_.sort_count(), 0);
      for (std::size_t s : shape) ++used[s];
      for (std::size_t s = 0; s < sig_.sort_count(); ++s) {
        if (used[s] >= budget_[s]) continue;
        key.push_back(kSeparator);
        key.push_back(s);
        std::vector<std::uint32_t> children;
        shape.push_back(s);
        values.push_back(0);
        for (Element e = 0; e < A.size(s); ++e) {
          values.back() = e;
          children.push_back(type(A, shape, values, rank - 1));
        }
        shape.pop_back();
        values.pop_back();
        std::sort(children.begin(), children.end());
        children.erase(std::unique(children.begin(), children.end()), children.end());
        key.insert(key.end(), children.begin(), children.end());
      }
    }
    auto [it, inserted] = interned_.emplace(std::move(key), static_cast<std::uint32_t>(interned_.size()));
    if (inserted) charge(1);
    return it->second;
  }

 private:
  static constexpr std::uint64_t kSeparator = ~std::uint64_t{0};

  void charge(std::uint64_t n) {
    used_ += n;
    if (used_ > options_.cap)
      throw CapExceeded("bounded equivalence check exceeded its cap of " + std::to_string(options_.cap) +
                        " types and atoms");
  }

  const AtomTable& atoms_for(const std::vector<std::size_t>& shape) {
    auto it = atom_tables_.find(shape);
    if (it != atom_tables_.end()) return it->second;

    AtomTable table;
    std::map<std::vector<std::size_t>, std::size_t> index;  // (kind, fn, args...) -> term
    auto add_term = [&](SymTerm t) -> bool {
      std::vector<std::size_t> k{t.is_var ? 0u : 1u, t.index};
      k.insert(k.end(), t.args.begin(), t.args.end());
      if (index.count(k)) return false;
      index.emplace(std::move(k), table.terms.size());
      table.terms.push_back(std::move(t));
      return true;
    };
    for (std::size_t v = 0; v < shape.size(); ++v) add_term(SymTerm{true, v, {}, shape[v]});
    const auto& fns = sig_.functions();
    for (std::size_t depth = 0; depth <= options_.term_depth; ++depth) {
      const std::size_t known = table.terms.size();
      for (std::size_t f = 0; f < fns.size(); ++f) {
        // Constants are depth-0 terms; proper applications need depth >= 1.
        if (fns[f].args.empty() != (depth == 0)) continue;
        std::vector<std::vector<std::size_t>> choices;
        bool empty = false;
        for (const Sort& s : fns[f].args) {
          std::vector<std::size_t> c;
          const std::size_t sidx = sig_.sort_index(s);
          for (std::size_t t = 0; t < known; ++t) {
            if (table.terms[t].sort == sidx) c.push_back(t);
          }
          empty = empty || c.empty();
          choices.push_back(std::move(c));
        }
        if (empty) continue;
        std::vector<std::size_t> pos(choices.size(), 0);
        for (;;) {
          SymTerm t{false, f, {}, sig_.sort_index(fns[f].result)};
          for (std::size_t i = 0; i < pos.size(); ++i) t.args.push_back(choices[i][pos[i]]);
          if (add_term(std::move(t))) charge(1);
          std::size_t i = pos.size();
          bool done = true;
          while (i > 0) {
            --i;
            if (++pos[i] < choices[i].size()) {
              done = false;
              break;
            }
            pos[i] = 0;
          }
          if (done) break;
        }
      }
    }
    for (std::size_t i = 0; i < table.terms.size(); ++i) {
      for (std::size_t j = i + 1; j < table.terms.size(); ++j) {
        if (table.terms[i].sort == table.terms[j].sort) {
          table.atoms.push_back(Atom{true, 0, {i, j}});
          charge(1);
        }
      }
    }
    for (std::size_t p = 0; p < sig_.predicates().size(); ++p) {
      const auto& args = sig_.predicates()[p].args;
      std::vector<std::vector<std::size_t>> choices;
      bool empty = false;
      for (const Sort& s : args) {
        std::vector<std::size_t> c;
        for (std::size_t t = 0; t < table.terms.size(); ++t) {
          if (table.terms[t].sort == sig_.sort_index(s)) c.push_back(t);
        }
        empty = empty || c.empty();
        choices.push_back(std::move(c));
      }
      if (empty) continue;
      std::vector<std::size_t> pos(choices.size(), 0);
      for (;;) {
        Atom a{false, p, {}};
        for (std::size_t i = 0; i < pos.size(); ++i) a.terms.push_back(choices[i][pos[i]]);
        table.atoms.push_back(std::move(a));
        charge(1);
        std::size_t i = pos.size();
        bool done = true;
        while (i > 0) {
          --i;
          if (++pos[i] < choices[i].size()) {
            done = false;
            break;
          }
          pos[i] = 0;
        }
        if (done) break;
      }
    }
    return atom_tables_.emplace(shape, std::move(table)).first->second;
  }

  const Signature& sig_;
  std::vector<std::size_t> budget_;
  EquivalenceOptions options_;
  std::map<std::vector<std::size_t>, AtomTable> atom_tables_;
  std::map<std::vector<std::uint64_t>, std::uint32_t> interned_;
  std::uint64_t used_ = 0;
};

}  // namespace

bool elem_equiv_up_to(const Structure& A, const Structure& B, std::size_t rank, std::size_t vars_per_sort,
                      const EquivalenceOptions& options) {
  if (!(A.signature() == B.signature())) throw EvalError("structures have different signatures");
  TypeBuilder builder(A.signature(), std::vector<std::size_t>(A.signature().sort_count(), vars_per_sort),
                      options);
  std::vector<std::size_t> shape;
  std::vector<Element> values;
  const auto ta = builder.type(A, shape, values, rank);
  const auto tb = builder.type(B, shape, values, rank);
  return ta == tb;
}

bool tarski_vaught_check(const Structure& A, const Structure& B, const Embedding& embedding, std::size_t rank,
                         std::size_t free_per_sort, const EquivalenceOptions& options) {
  if (!is_substructure(A, B, embedding)) throw EvalError("not a substructure of the given structure");
  if (rank == 0) return true;
  const Signature& sig = A.signature();
  const std::size_t nsorts = sig.sort_count();
  // Parameters, the witness variable, and rank - 1 further quantified variables.
  TypeBuilder builder(sig, std::vector<std::size_t>(nsorts, free_per_sort + rank), options);

  std::vector<std::size_t> shape;
  for (std::size_t s = 0; s < nsorts; ++s) {
    for (std::size_t i = 0; i < free_per_sort; ++i) shape.push_back(s);
  }
  std::vector<Element> params(shape.size(), 0);
  for (;;) {
    std::vector<Element> imaged(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) imaged[i] = embedding[shape[i]][params[i]];
    for (std::size_t s = 0; s < nsorts; ++s) {
      std::vector<std::size_t> ext = shape;
      ext.push_back(s);
      std::set<std::uint32_t> in_a;
      std::vector<Element> values = params;
      values.push_back(0);
      for (Element e = 0; e < A.size(s); ++e) {
        values.back() = e;
        in_a.insert(builder.type(A, ext, values, rank - 1));
      }
      values = imaged;
      values.push_back(0);
      for (Element e = 0; e < B.size(s); ++e) {
        values.back() = e;
        if (!in_a.count(builder.type(B, ext, values, rank - 1))) return false;
      }
    }
    std::size_t i = params.size();
    bool done = true;
    while (i > 0) {
      --i;
      if (++params[i] < A.size(shape[i])) {
        done = false;
        break;
      }
      params[i] = 0;
    }
    if (done) break;
  }
  return true;
}

bool tarski_vaught_check(const Structure& A, const Structure& B, std::size_t rank, std::size_t free_per_sort,
                         const EquivalenceOptions& options) {
  Embedding identity(A.signature().sort_count());
  for (std::size_t s = 0; s < identity.size(); ++s) {
    for (Element e = 0; e < A.size(s); ++e) identity[s].push_back(e);
  }
  return tarski_vaught_check(A, B, identity, rank, free_per_sort, options);
}

}  // namespace msk
