#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "msortkit/limits.hpp"
#include "msortkit/structure.hpp"
#include "msortkit/syntax.hpp"

namespace msk {

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Reference evaluator by structural recursion. Throws EvalError when a free
/// variable is missing from `nu`.
Element eval_term(const Structure& A, const Assignment& nu, const Term& t);
bool satisfies(const Structure& A, const Assignment& nu, const Formula& f);
inline bool satisfies(const Structure& A, const Formula& f) { return satisfies(A, {}, f); }

/// A formula with symbols resolved to table indices and variables to slots.
/// The first slots hold the free variables in the order given at compile time.
class CompiledFormula {
 public:
  CompiledFormula(const Formula& f, const Signature& sig, std::vector<Variable> free_order = {});
  ~CompiledFormula();
  CompiledFormula(CompiledFormula&&) noexcept;
  CompiledFormula& operator=(CompiledFormula&&) noexcept;

  std::size_t slot_count() const;
  const std::vector<Variable>& free_order() const { return free_order_; }

  /// `env` must have slot_count() entries; free-variable slots are read,
  /// the others are scratch space.
  bool eval(const Structure& A, std::vector<Element>& env) const;
  bool eval(const Structure& A, const Assignment& nu) const;

 private:
  struct Impl;
  std::vector<Variable> free_order_;
  std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------
// Theories and bounded model finding
// ---------------------------------------------------------------------------

/// A theory given by finitely many axioms (sentences) over a signature.
struct TheoryDef {
  SignaturePtr signature;
  std::vector<FormulaPtr> axioms;
  std::optional<std::set<Sort>> designated;

  /// Sort-checks the axioms and rejects free variables.
  void validate() const;
};

TheoryDef theory_from_document(const Document& doc);
bool satisfies_theory(const Structure& A, const TheoryDef& T);

/// One size per sort, in signature declaration order.
using SizeTuple = std::vector<std::size_t>;

/// Per-sort inclusive size ranges.
struct SizeBounds {
  SizeTuple lo;
  SizeTuple hi;

  static SizeBounds uniform(std::size_t sort_count, std::size_t max_size);
  static SizeBounds exactly(const SizeTuple& sizes);
};

/// Size profiles inside `bounds` ordered by total size, then lexicographically.
std::vector<SizeTuple> size_profiles(const SizeBounds& bounds);

struct EnumerationOptions {
  std::uint64_t cap = enumeration_cap();  // structures visited per call
  bool dedup_isomorphic = false;
  unsigned jobs = 1;
};

/// Visits the models of T at the given sizes in canonical order: tables are
/// concatenated (functions, then predicates, declaration order) and read as
/// a number whose first cell is most significant. Returning false from
/// `visit` stops the enumeration. Returns the number of structures visited.
std::uint64_t for_each_model(const TheoryDef& T, const SizeTuple& sizes,
                             const std::function<bool(const Structure&)>& visit,
                             const EnumerationOptions& options = {});

std::vector<Structure> enumerate_models(const TheoryDef& T, const SizeTuple& sizes,
                                        const EnumerationOptions& options = {});
/// All models over every profile in `bounds`, profiles in size_profiles order.
std::vector<Structure> enumerate_models(const TheoryDef& T, const SizeBounds& bounds,
                                        const EnumerationOptions& options = {});

struct SatWitness {
  Structure structure;
  Assignment assignment;
};

/// First (profile, model, assignment) in canonical order with all sizes in
/// `bounds` such that the model satisfies T and the assignment satisfies φ.
/// Assignments are tried lexicographically over free_vars(φ) order.
std::optional<SatWitness> check_sat(const TheoryDef& T, const Formula& phi, const SizeBounds& bounds,
                                    const EnumerationOptions& options = {});
std::optional<SatWitness> check_sat(const TheoryDef& T, const Formula& phi, std::size_t bound,
                                    const EnumerationOptions& options = {});

/// Calls `visit` for every assignment of `vars` into A in lexicographic order
/// until it returns false.
void for_each_assignment(const Structure& A, const std::vector<Variable>& vars,
                         const std::function<bool(const Assignment&)>& visit);

// ---------------------------------------------------------------------------
// Substructures, isomorphism, bounded elementary equivalence
// ---------------------------------------------------------------------------

/// Per sort, the image in the parent structure of each element of the child.
using Embedding = std::vector<std::vector<Element>>;

struct Substructure {
  Structure structure;
  Embedding embedding;
};

/// Least substructure containing `seeds` (per sort index) and closed under all
/// functions. Elements keep their relative order. Throws EvalError if a sort
/// ends up empty.
Substructure generated_substructure(const Structure& A, const std::vector<std::set<Element>>& seeds);

/// True if `embedding` is an injective map from A into B preserving every
/// function and predicate both ways.
bool is_substructure(const Structure& A, const Structure& B, const Embedding& embedding);

bool isomorphic(const Structure& A, const Structure& B);

struct EquivalenceOptions {
  std::size_t term_depth = 1;                    // atoms use terms up to this depth
  std::uint64_t cap = 100'000;                   // interned types and atoms
};

/// Agreement on all sentences of quantifier rank <= rank using at most
/// `vars_per_sort` variables of each sort, decided by comparing Hintikka types.
bool elem_equiv_up_to(const Structure& A, const Structure& B, std::size_t rank,
                      std::size_t vars_per_sort, const EquivalenceOptions& options = {});

/// Tarski-Vaught test at bounded rank: for every formula ∃v φ(x⃗, v) of rank at
/// most `rank` with up to `free_per_sort` parameters per sort, and every choice
/// of parameters from A, truth in B implies truth in A. A is embedded in B by
/// `embedding`; throws EvalError if that is not a substructure embedding.
bool tarski_vaught_check(const Structure& A, const Structure& B, const Embedding& embedding,
                         std::size_t rank, std::size_t free_per_sort = 1,
                         const EquivalenceOptions& options = {});
/// As above with A's element i identified with B's element i.
bool tarski_vaught_check(const Structure& A, const Structure& B, std::size_t rank,
                         std::size_t free_per_sort = 1, const EquivalenceOptions& options = {});

}  // namespace msk
