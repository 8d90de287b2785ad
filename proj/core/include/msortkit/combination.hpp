#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "msortkit/arrangements.hpp"
#include "msortkit/ramsey.hpp"
#include "msortkit/semantics.hpp"

namespace msk {

// ---------------------------------------------------------------------------
// Theory solvers
// ---------------------------------------------------------------------------

/// Maps a quantifier-free formula to an equivalent one (modulo the fresh
/// variables it introduces) whose models can be shrunk onto its variables.
using WitnessFunction = std::function<FormulaPtr(const FormulaPtr&)>;

struct SolveResult {
  std::optional<SatWitness> witness;
  /// True when a negative answer holds for all sizes, not just up to the bound.
  bool conclusive = false;
};

/// A theory with a bounded model-enumeration backend.
struct TheorySolver {
  TheoryDef theory;
  std::set<Sort> designated;
  WitnessFunction wit;  // may be empty
  std::size_t size_cap = 0;  // 0: no cap beyond the caller's bound
  EnumerationOptions enumeration;

  SolveResult solve(const FormulaPtr& phi, const SizeBounds& bounds) const;
  SolveResult solve(const FormulaPtr& phi, std::size_t bound) const;

  /// True if searching `bounds` decides φ for every size: the signature is
  /// pure equality and each sort's upper bound reaches its lower bound, the
  /// largest quantifier rank of φ and the axioms, and the number of variable
  /// classes of that sort after merging top-level equalities.
  bool complete_for(const Formula& phi, const SizeBounds& bounds) const;
};

/// Theory without axioms over the given sorts, designated = shared, carrying
/// wit_empty_theory as its witness function.
TheorySolver empty_theory_solver(const std::vector<Sort>& sorts, const std::set<Sort>& shared);
/// Theory over one sort whose models have exactly n elements.
TheorySolver exact_cardinality_solver(const Sort& s, std::size_t n);

/// φ ∧ (w = w) for a fresh variable w of every shared sort. Throws
/// SignatureError if `sig` has function or predicate symbols and Error if φ
/// has quantifiers.
FormulaPtr wit_empty_theory(const FormulaPtr& phi, const std::set<Sort>& shared, const Signature& sig);

struct WitnessReport {
  std::uint64_t assignments_checked = 0;
  std::uint64_t arrangements_checked = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks both witness-function properties for φ on the models of T with all
/// sizes <= max_size: φ and ∃w⃗ wit(φ) agree on every assignment, and every
/// T-satisfiable wit(φ) ∧ δ_V has a model whose designated domains are exactly
/// the values of the variables. V is vars(wit(φ)) on the designated sorts,
/// then that set grown by up to `extra_vars` fresh variables per sort.
WitnessReport check_witness_function(const TheorySolver& T, const FormulaPtr& phi, std::size_t max_size,
                                     std::size_t extra_vars = 1);

// ---------------------------------------------------------------------------
// Combination procedures
// ---------------------------------------------------------------------------

enum class Verdict { Sat, Unsat, Unknown };

/// "SAT", "UNSAT", "UNKNOWN-at-bound".
std::string verdict_name(Verdict v);
/// 0, 1, 2.
int verdict_exit_code(Verdict v);

struct Certificate {
  VariableSet shared_vars;
  Arrangement arrangement;
  FormulaPtr side1;  // formula checked on the first theory, including δ_V
  FormulaPtr side2;
  SatWitness witness1;
  SatWitness witness2;
  std::optional<SizeTuple> kappa;  // shiny: chosen minmods entry
};

struct CombineResult {
  Verdict verdict = Verdict::Unknown;
  std::optional<Certificate> certificate;
  std::optional<SatWitness> union_witness;  // oracle only
  std::uint64_t arrangements_tried = 0;
};

/// Sorts common to both signatures. Throws SignatureError if a function or
/// predicate name occurs in both.
std::set<Sort> shared_sorts(const Signature& a, const Signature& b);

/// Searches arrangements δ_V of V = shared variables of wit(φ1) and φ2 such
/// that wit(φ1) ∧ δ_V is T1-satisfiable and φ2 ∧ δ_V is T2-satisfiable, all
/// sizes <= bound. Requires T1.wit.
CombineResult polite_combine(const TheorySolver& T1, const TheorySolver& T2, const FormulaPtr& phi1,
                             const FormulaPtr& phi2, std::size_t bound);

/// Searches arrangements δ_V of the shared variables of φ1 ∧ φ2 and κ in
/// minmods(T1, shared, φ1 ∧ δ_V) such that T2 has a model of φ2 ∧ δ_V with
/// every shared sort of size >= κ.
CombineResult shiny_combine(const TheorySolver& T1, const TheorySolver& T2, const FormulaPtr& phi1,
                            const FormulaPtr& phi2, std::size_t bound);

/// Bounded satisfiability of φ1 ∧ φ2 in the theory with both axiom sets.
CombineResult oracle_combine(const TheorySolver& T1, const TheorySolver& T2, const FormulaPtr& phi1,
                             const FormulaPtr& phi2, std::size_t bound);

/// Re-checks a certificate: both witnesses satisfy their side and induce the
/// certificate's arrangement on the shared variables.
bool verify_certificate(const Certificate& c);

// ---------------------------------------------------------------------------
// Minimal model sizes and bounded property checks
// ---------------------------------------------------------------------------

/// Sizes of the sorts in S (signature order) for a size tuple of T.
SizeTuple project_sizes(const Signature& sig, const std::set<Sort>& S, const SizeTuple& sizes);
bool dominates(const SizeTuple& a, const SizeTuple& b);  // b ≼ a componentwise

/// The ≼-minimal S-sizes of models of φ with all sizes <= bound, sorted.
std::vector<SizeTuple> minmods(const TheorySolver& T, const std::set<Sort>& S, const FormulaPtr& phi,
                               std::size_t bound);

struct PropertyViolation {
  SizeTuple model_sizes;  // a profile where φ is satisfiable
  SizeTuple target;       // S-sizes that could not be realized
  std::string message;
};

struct PropertyReport {
  std::uint64_t profiles_checked = 0;
  std::vector<PropertyViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// For every profile with a model of φ, looks for a model of φ with S-sizes
/// componentwise no larger. A size equal to the bound stands in for an
/// infinite domain, so such S-sorts must shrink strictly.
PropertyReport check_stably_finite_at(const TheorySolver& T, const std::set<Sort>& S, const FormulaPtr& phi,
                                      std::size_t bound);

/// For every profile with a model of φ and every κ between its S-sizes and the
/// bound, looks for a model of φ whose S-sizes are exactly κ.
PropertyReport check_finitely_smooth_at(const TheorySolver& T, const std::set<Sort>& S, const FormulaPtr& phi,
                                        std::size_t bound);

// ---------------------------------------------------------------------------
// Γ fragments
// ---------------------------------------------------------------------------

struct GammaSetup {
  SignaturePtr signature;
  std::vector<Sort> sort_order;        // σ1..σn; empty means declaration order
  std::size_t ell = 0;                 // sorts σ1..σℓ get exactly |C_i| elements
  std::vector<std::size_t> constants;  // |C_i| per sort, in sort_order
  std::size_t term_depth = 2;
  std::optional<SizeTuple> sizes;      // overrides the size plan (sort_order)

  std::vector<Sort> ordered_sorts() const;
  void validate() const;
};

struct GammaCaps {
  std::uint64_t instances = 100'000;  // Γ2 equalities and term templates
  std::uint64_t colorings = 100'000;  // functions handed to the Ramsey search
  RamseySearchOptions search;
};

/// A term over the base signature with one distinct slot variable per leaf.
struct TermTemplate {
  TermPtr term;
  std::vector<Variable> slots;             // left to right
  std::vector<std::size_t> slot_position;  // index into ordered sorts
  std::size_t position = 0;                // of the term's sort

  std::size_t slots_at(std::size_t position) const;
};

struct GammaFragments {
  SignaturePtr signature;  // base signature plus the constants
  std::vector<std::vector<std::string>> constants;  // c<i>_<α>, per ordered sort
  std::vector<FormulaPtr> gamma1;
  std::vector<FormulaPtr> gamma2;
  std::vector<FormulaPtr> gamma3;
  std::vector<TermTemplate> terms;  // templates with at least one Γ2 equality

  std::vector<FormulaPtr> all() const;
};

/// Linear term templates of depth <= depth, grouped by the template's sort.
std::vector<TermTemplate> term_templates(const Signature& sig, const std::vector<Sort>& order, std::size_t depth,
                                         std::uint64_t cap);

GammaFragments gamma_fragments(const GammaSetup& setup, const FormulaPtr& phi, const GammaCaps& caps = {});

/// Sizes per ordered sort: |C_i| for i <= ℓ; above ℓ the Ramsey requirement
/// for the terms of lower sorts, using pigeonhole when every relevant term has
/// one slot of the sort. Nullopt past 64 bits.
std::optional<SizeTuple> try_gamma_size_plan(const GammaSetup& setup, const GammaFragments& fragments);
SizeTuple gamma_size_plan(const GammaSetup& setup, const GammaFragments& fragments);

struct GammaModel {
  Structure structure;  // over fragments.signature
  Assignment assignment;
  std::vector<std::vector<Element>> constants;  // per ordered sort
  SizeTuple sizes;                              // per ordered sort
};

/// Builds a model of {φ} ∪ Γ'1 ∪ Γ'2 ∪ Γ'3: a base model of φ at the planned
/// sizes, with constants placed order-compatibly inside Ramsey witness sets,
/// from the last sort down. The result is checked with satisfies before it is
/// returned.
GammaModel construct_gamma_fragment_model(const GammaSetup& setup, const FormulaPtr& phi,
                                          const GammaFragments& fragments, const TheorySolver& base,
                                          const GammaCaps& caps = {});

}  // namespace msk
