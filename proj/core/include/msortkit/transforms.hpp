#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "msortkit/limits.hpp"
#include "msortkit/semantics.hpp"
#include "msortkit/syntax.hpp"

namespace msk {

// ---------------------------------------------------------------------------
// Prenex normal form and Skolemization
// ---------------------------------------------------------------------------

struct Prenex {
  std::vector<std::pair<Formula::Kind, Variable>> prefix;  // outermost first
  FormulaPtr matrix;                                       // quantifier-free

  FormulaPtr formula() const;
};

/// Pulls quantifiers out left to right without first converting to negation
/// normal form. A bound variable whose name is already used (free in the input
/// or bound earlier in the prefix) is renamed to name_<counter>.
Prenex to_prenex(const FormulaPtr& phi);
FormulaPtr to_pnf(const FormulaPtr& phi);

struct Skolemized {
  Signature signature;  // input signature (split dropped) plus the sk_<i> symbols
  FormulaPtr sentence;  // universal sentence
  std::vector<FunctionSymbol> skolem_functions;
};

/// Replaces each existential of the prenex form by a fresh function sk_<i> of
/// the universals before it. Throws SignatureError if the signature already
/// has a symbol with the sk_ prefix and SortError if phi has free variables.
Skolemized skolemize(const FormulaPtr& phi, const Signature& sig);

// ---------------------------------------------------------------------------
// Split signatures: GDNF and GCNF
// ---------------------------------------------------------------------------

/// A signature with a validated split, plus the block of every sort.
class SplitContext {
 public:
  /// Uses the signature's split, or the complete split (one block per sort)
  /// if none is declared.
  explicit SplitContext(const Signature& sig);

  const Signature& signature() const { return sig_; }
  std::size_t block_count() const { return blocks_.size(); }
  const std::vector<Sort>& block(std::size_t b) const { return blocks_[b]; }
  std::size_t block_of(const Sort& s) const;
  /// Block of a function or predicate symbol; nullary predicates go to block 0.
  std::size_t block_of_symbol(const std::string& name) const;

  /// Blocks touched by the formula's sorts and symbols.
  std::set<std::size_t> blocks_of(const Formula& f) const;
  /// Nullopt if φ touches no block (e.g. true) or more than one.
  std::optional<std::size_t> local_block(const Formula& f) const;
  bool is_block_local(const Formula& f) const { return blocks_of(f).size() <= 1; }

 private:
  Signature sig_;
  std::vector<std::vector<Sort>> blocks_;
  std::map<Sort, std::size_t> sort_block_;
};

struct NormalFormOptions {
  std::uint64_t node_cap = 1'000'000;  // formula nodes built during conversion
};

/// Disjunction of generalized cubes (conjunctions of block-local formulas
/// from pairwise distinct blocks), equivalent to φ.
FormulaPtr to_gdnf(const FormulaPtr& phi, const SplitContext& ctx, const NormalFormOptions& options = {});
/// Conjunction of generalized clauses, equivalent to φ.
FormulaPtr to_gcnf(const FormulaPtr& phi, const SplitContext& ctx, const NormalFormOptions& options = {});

bool is_gdnf(const Formula& phi, const SplitContext& ctx);
bool is_gcnf(const Formula& phi, const SplitContext& ctx);

// ---------------------------------------------------------------------------
// Cardinality formulas
// ---------------------------------------------------------------------------

/// ∃x1..xn pairwise distinct; true for n <= 1.
FormulaPtr at_least_formula(const Sort& s, std::size_t n);
/// ψ≥n ∧ ¬ψ≥(n+1), with a true conjunct dropped. Requires n >= 1.
FormulaPtr exact_cardinality_formula(const Sort& s, std::size_t n);

// ---------------------------------------------------------------------------
// Bounded verification
// ---------------------------------------------------------------------------

/// First structure (all sizes <= max_size, no axioms) and assignment of the
/// free variables of a and b on which they disagree.
std::optional<SatWitness> find_inequivalence(const FormulaPtr& a, const FormulaPtr& b, const SignaturePtr& sig,
                                             std::size_t max_size, const EnumerationOptions& options = {});

/// First size profile <= max_size where phi and its Skolemization differ in
/// satisfiability.
std::optional<SizeTuple> find_skolem_mismatch(const FormulaPtr& phi, const SignaturePtr& sig, const Skolemized& sk,
                                              std::size_t max_size, const EnumerationOptions& options = {});

}  // namespace msk
