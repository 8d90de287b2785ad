#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "msortkit/error.hpp"

namespace msk {

// ---------------------------------------------------------------------------
// Sorts and signatures
// ---------------------------------------------------------------------------

/// A sort, identified by its name. Sorts with equal names are the same sort
/// in every signature, which is what lets disjoint signatures share sorts.
struct Sort {
  std::string name;

  auto operator<=>(const Sort&) const = default;
};

struct FunctionSymbol {
  std::string name;
  std::vector<Sort> args;
  Sort result;

  bool operator==(const FunctionSymbol&) const = default;
};

struct PredicateSymbol {
  std::string name;
  std::vector<Sort> args;

  bool operator==(const PredicateSymbol&) const = default;
};

/// Symbols starting with this prefix are reserved for Skolem functions.
inline constexpr std::string_view kSkolemPrefix = "sk_";

/// Many-sorted signature. Equality is implicit for every sort.
///
/// An optional split partitions the sorts into blocks; every function and
/// predicate symbol must then keep all of its arity sorts inside one block.
class Signature {
 public:
  using Split = std::vector<std::vector<Sort>>;

  void add_sort(const std::string& name);
  void add_function(FunctionSymbol f);
  void add_predicate(PredicateSymbol p);
  void set_split(Split blocks);

  const std::vector<Sort>& sorts() const { return sorts_; }
  const std::vector<FunctionSymbol>& functions() const { return functions_; }
  const std::vector<PredicateSymbol>& predicates() const { return predicates_; }
  const std::optional<Split>& split() const { return split_; }

  bool has_sort(const Sort& s) const { return sort_index_.count(s.name) != 0; }
  /// Declaration index of `s`; throws SortError if undeclared.
  std::size_t sort_index(const Sort& s) const;
  std::size_t sort_count() const { return sorts_.size(); }

  std::optional<std::size_t> function_index(std::string_view name) const;
  std::optional<std::size_t> predicate_index(std::string_view name) const;
  const FunctionSymbol* find_function(std::string_view name) const;
  const PredicateSymbol* find_predicate(std::string_view name) const;
  bool has_symbol(std::string_view name) const;

  /// True if the signature has only sorts (and the implicit equalities).
  bool is_empty() const { return functions_.empty() && predicates_.empty(); }

  /// Block index of `s` under the split; nullopt if no split is declared.
  std::optional<std::size_t> block_of(const Sort& s) const;

  /// Union of two disjoint signatures: sorts are merged by name, function and
  /// predicate symbols must not overlap. Splits are dropped.
  static Signature merge(const Signature& a, const Signature& b);

  bool operator==(const Signature& other) const;

 private:
  void check_declared(const std::vector<Sort>& sorts, const std::string& symbol) const;
  void check_fresh_symbol(const std::string& name) const;
  void check_split_symbol(const std::string& name, const std::vector<Sort>& sorts) const;

  std::vector<Sort> sorts_;
  std::map<std::string, std::size_t, std::less<>> sort_index_;
  std::vector<FunctionSymbol> functions_;
  std::map<std::string, std::size_t, std::less<>> function_index_;
  std::vector<PredicateSymbol> predicates_;
  std::map<std::string, std::size_t, std::less<>> predicate_index_;
  std::optional<Split> split_;
};

using SignaturePtr = std::shared_ptr<const Signature>;

// ---------------------------------------------------------------------------
// Terms and formulas
// ---------------------------------------------------------------------------

struct Variable {
  std::string name;
  Sort sort;

  auto operator<=>(const Variable&) const = default;
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Variable, Apply };

  Kind kind = Kind::Variable;
  std::string name;  // variable or function symbol
  Sort sort;         // variable sort, or result sort of the application
  std::vector<TermPtr> args;

  Variable variable() const { return {name, sort}; }
};

bool operator==(const Term& a, const Term& b);

TermPtr make_var(Variable v);
TermPtr make_var(std::string name, Sort sort);
/// Sort-checked application of a declared function symbol.
TermPtr make_app(const Signature& sig, const std::string& name, std::vector<TermPtr> args);
/// Application without a signature check; `result` is taken on trust.
TermPtr make_app_unchecked(std::string name, Sort result, std::vector<TermPtr> args);

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { True, False, Equal, Predicate, Not, And, Or, Implies, Forall, Exists };

  Kind kind = Kind::True;
  std::string symbol;                 // predicate name
  std::vector<TermPtr> terms;         // Equal: two terms; Predicate: arguments
  std::vector<FormulaPtr> children;   // Not: 1, And/Or: >= 1, Implies: 2, quantifiers: 1
  Variable bound;                     // quantifiers only

  bool is_quantifier() const { return kind == Kind::Forall || kind == Kind::Exists; }
  bool is_atom() const {
    return kind == Kind::True || kind == Kind::False || kind == Kind::Equal ||
           kind == Kind::Predicate;
  }
};

/// Structural equality, no alpha-renaming.
bool operator==(const Formula& a, const Formula& b);
bool same(const FormulaPtr& a, const FormulaPtr& b);

FormulaPtr top();
FormulaPtr bottom();
/// Throws SortError when the two sides have different sorts.
FormulaPtr equal(TermPtr lhs, TermPtr rhs);
FormulaPtr predicate(const Signature& sig, const std::string& name, std::vector<TermPtr> args);
FormulaPtr predicate_unchecked(std::string name, std::vector<TermPtr> args);
FormulaPtr negation(FormulaPtr f);
/// n-ary connective nodes; `children` must be nonempty.
FormulaPtr make_and(std::vector<FormulaPtr> children);
FormulaPtr make_or(std::vector<FormulaPtr> children);
/// Smart constructors: no children gives the unit, one child is returned as is.
FormulaPtr conjunction(std::vector<FormulaPtr> children);
FormulaPtr disjunction(std::vector<FormulaPtr> children);
FormulaPtr implies(FormulaPtr lhs, FormulaPtr rhs);
FormulaPtr forall(Variable v, FormulaPtr body);
FormulaPtr exists(Variable v, FormulaPtr body);
FormulaPtr quantify(Formula::Kind kind, Variable v, FormulaPtr body);

// ---------------------------------------------------------------------------
// Variable sets
// ---------------------------------------------------------------------------

/// Finite sets of variables grouped by sort. Iteration order is sort name,
/// then variable name.
class VariableSet {
 public:
  VariableSet() = default;
  VariableSet(std::initializer_list<Variable> vars);

  void insert(const Variable& v) { per_sort_[v.sort].insert(v.name); }
  void insert(const VariableSet& other);
  bool contains(const Variable& v) const;
  bool empty() const { return per_sort_.empty(); }
  std::size_t size() const;

  std::vector<Sort> sorts() const;
  std::vector<std::string> of_sort(const Sort& s) const;
  std::vector<Variable> variables() const;
  VariableSet restricted_to(const std::set<Sort>& sorts) const;

  bool operator==(const VariableSet&) const = default;

 private:
  std::map<Sort, std::set<std::string>> per_sort_;
};

VariableSet free_vars(const Term& t);
VariableSet free_vars(const Formula& f, const std::optional<std::set<Sort>>& filter = std::nullopt);
/// Free and bound variable names, used to pick fresh names.
std::set<std::string> all_variable_names(const Formula& f);

bool is_quantifier_free(const Formula& f);
bool is_sentence(const Formula& f);
std::size_t quantifier_rank(const Formula& f);
/// Every sort mentioned by a term, an atom, or a binder.
std::set<Sort> sorts_of(const Formula& f);
/// Function and predicate symbols occurring in the formula.
std::set<std::string> symbols_of(const Formula& f);
/// Number of formula and term nodes.
std::size_t node_count(const Formula& f);

/// Capture-avoiding substitution of free variables.
FormulaPtr substitute(const FormulaPtr& f, const std::map<Variable, TermPtr>& subst);
TermPtr substitute(const TermPtr& t, const std::map<Variable, TermPtr>& subst);

/// Checks every symbol and sort against `sig`; throws SortError.
void sort_check(const Formula& f, const Signature& sig);

/// Returns `base` if unused, else `base_0`, `base_1`, ... whichever is free first.
std::string fresh_name(const std::string& base, const std::set<std::string>& used);

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

std::string to_string(const Term& t);
std::string to_string(const Formula& f);
inline std::string print_formula(const Formula& f) { return to_string(f); }
inline std::string print_formula(const FormulaPtr& f) { return to_string(*f); }
std::string print_signature(const Signature& sig);

using VariableScope = std::map<std::string, Sort, std::less<>>;

/// A theory or query file: declarations, declared free variables, assertions.
struct Document {
  Signature signature;
  VariableScope variables;
  std::vector<FormulaPtr> assertions;
};

Document parse_document(std::string_view text);
Signature parse_signature(std::string_view text);
FormulaPtr parse_formula(std::string_view text, const Signature& sig,
                         const VariableScope& declared = {});
TermPtr parse_term(std::string_view text, const Signature& sig, const VariableScope& declared = {});

}  // namespace msk
