#include "msortkit/syntax.hpp"

#include <algorithm>
#include <functional>
#include <utility>

#include "msortkit/sexpr.hpp"

namespace msk {

// ---------------------------------------------------------------------------
// Signature
// ---------------------------------------------------------------------------

namespace {

const std::set<std::string, std::less<>> kReservedWords = {
    "true", "false", "not", "and", "or", "=>", "=", "forall", "exists",
    "sort", "split", "declare-fun", "declare-pred", "declare-var", "assert"};

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == '(' || c == ')' || c == ';' || c == '"' || static_cast<unsigned char>(c) <= ' ')
      return false;
  }
  return kReservedWords.count(s) == 0;
}

std::string join_sorts(const std::vector<Sort>& sorts) {
  std::string out;
  for (std::size_t i = 0; i < sorts.size(); ++i) {
    if (i) out += ' ';
    out += sorts[i].name;
  }
  return out;
}

}  // namespace

void Signature::add_sort(const std::string& name) {
  if (!valid_identifier(name)) throw SignatureError("invalid sort name '" + name + "'");
  if (sort_index_.count(name)) throw SignatureError("duplicate sort '" + name + "'");
  if (split_) throw SignatureError("sort '" + name + "' declared after the split");
  sort_index_.emplace(name, sorts_.size());
  sorts_.push_back(Sort{name});
}

void Signature::check_declared(const std::vector<Sort>& sorts, const std::string& symbol) const {
  for (const Sort& s : sorts) {
    if (!has_sort(s))
      throw SignatureError("undeclared sort '" + s.name + "' in arity of '" + symbol + "'");
  }
}

void Signature::check_fresh_symbol(const std::string& name) const {
  if (!valid_identifier(name)) throw SignatureError("invalid symbol name '" + name + "'");
  if (has_symbol(name)) throw SignatureError("duplicate symbol '" + name + "'");
}

void Signature::check_split_symbol(const std::string& name, const std::vector<Sort>& sorts) const {
  if (!split_ || sorts.empty()) return;
  auto first = block_of(sorts.front());
  for (const Sort& s : sorts) {
    if (block_of(s) != first)
      throw SignatureError("symbol '" + name + "' crosses split blocks (" + join_sorts(sorts) + ")");
  }
}

void Signature::add_function(FunctionSymbol f) {
  check_fresh_symbol(f.name);
  std::vector<Sort> all = f.args;
  all.push_back(f.result);
  check_declared(all, f.name);
  check_split_symbol(f.name, all);
  function_index_.emplace(f.name, functions_.size());
  functions_.push_back(std::move(f));
}

void Signature::add_predicate(PredicateSymbol p) {
  check_fresh_symbol(p.name);
  check_declared(p.args, p.name);
  check_split_symbol(p.name, p.args);
  predicate_index_.emplace(p.name, predicates_.size());
  predicates_.push_back(std::move(p));
}

void Signature::set_split(Split blocks) {
  if (split_) throw SignatureError("split declared twice");
  std::set<Sort> seen;
  for (const auto& block : blocks) {
    if (block.empty()) throw SignatureError("empty block in split");
    for (const Sort& s : block) {
      if (!has_sort(s)) throw SignatureError("undeclared sort '" + s.name + "' in split");
      if (!seen.insert(s).second)
        throw SignatureError("sort '" + s.name + "' appears in two split blocks");
    }
  }
  for (const Sort& s : sorts_) {
    if (!seen.count(s)) throw SignatureError("sort '" + s.name + "' missing from split");
  }
  split_ = std::move(blocks);
  try {
    for (const auto& f : functions_) {
      std::vector<Sort> all = f.args;
      all.push_back(f.result);
      check_split_symbol(f.name, all);
    }
    for (const auto& p : predicates_) check_split_symbol(p.name, p.args);
  } catch (...) {
    split_.reset();
    throw;
  }
}

std::size_t Signature::sort_index(const Sort& s) const {
  auto it = sort_index_.find(s.name);
  if (it == sort_index_.end()) throw SortError("undeclared sort '" + s.name + "'");
  return it->second;
}

std::optional<std::size_t> Signature::function_index(std::string_view name) const {
  auto it = function_index_.find(name);
  if (it == function_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Signature::predicate_index(std::string_view name) const {
  auto it = predicate_index_.find(name);
  if (it == predicate_index_.end()) return std::nullopt;
  return it->second;
}

const FunctionSymbol* Signature::find_function(std::string_view name) const {
  auto i = function_index(name);
  return i ? &functions_[*i] : nullptr;
}

const PredicateSymbol* Signature::find_predicate(std::string_view name) const {
  auto i = predicate_index(name);
  return i ? &predicates_[*i] : nullptr;
}

bool Signature::has_symbol(std::string_view name) const {
  return function_index_.count(name) || predicate_index_.count(name);
}

std::optional<std::size_t> Signature::block_of(const Sort& s) const {
  if (!split_) return std::nullopt;
  for (std::size_t b = 0; b < split_->size(); ++b) {
    const auto& block = (*split_)[b];
    if (std::find(block.begin(), block.end(), s) != block.end()) return b;
  }
  throw SortError("sort '" + s.name + "' is not in the split");
}

Signature Signature::merge(const Signature& a, const Signature& b) {
  Signature out;
  for (const Sort& s : a.sorts_) out.add_sort(s.name);
  for (const Sort& s : b.sorts_) {
    if (!out.has_sort(s)) out.add_sort(s.name);
  }
  for (const auto& f : a.functions_) out.add_function(f);
  for (const auto& p : a.predicates_) out.add_predicate(p);
  for (const auto& f : b.functions_) out.add_function(f);
  for (const auto& p : b.predicates_) out.add_predicate(p);
  return out;
}

bool Signature::operator==(const Signature& other) const {
  return sorts_ == other.sorts_ && functions_ == other.functions_ &&
         predicates_ == other.predicates_ && split_ == other.split_;
}

// ---------------------------------------------------------------------------
// Terms and formulas
// ---------------------------------------------------------------------------

bool operator==(const Term& a, const Term& b) {
  if (a.kind != b.kind || a.name != b.name || a.sort != b.sort) return false;
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (a.args[i] != b.args[i] && !(*a.args[i] == *b.args[i])) return false;
  }
  return true;
}

TermPtr make_var(Variable v) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Variable;
  t->name = std::move(v.name);
  t->sort = std::move(v.sort);
  return t;
}

TermPtr make_var(std::string name, Sort sort) { return make_var(Variable{std::move(name), std::move(sort)}); }

TermPtr make_app(const Signature& sig, const std::string& name, std::vector<TermPtr> args) {
  const FunctionSymbol* f = sig.find_function(name);
  if (!f) throw SortError("unknown function symbol '" + name + "'");
  if (f->args.size() != args.size())
    throw SortError("function '" + name + "' expects " + std::to_string(f->args.size()) +
                    " arguments, got " + std::to_string(args.size()));
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i]->sort != f->args[i])
      throw SortError("argument " + std::to_string(i + 1) + " of '" + name + "' has sort " +
                      args[i]->sort.name + ", expected " + f->args[i].name);
  }
  return make_app_unchecked(name, f->result, std::move(args));
}

TermPtr make_app_unchecked(std::string name, Sort result, std::vector<TermPtr> args) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Apply;
  t->name = std::move(name);
  t->sort = std::move(result);
  t->args = std::move(args);
  return t;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.kind != b.kind || a.symbol != b.symbol || a.bound != b.bound) return false;
  if (a.terms.size() != b.terms.size() || a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    if (a.terms[i] != b.terms[i] && !(*a.terms[i] == *b.terms[i])) return false;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same(a.children[i], b.children[i])) return false;
  }
  return true;
}

bool same(const FormulaPtr& a, const FormulaPtr& b) { return a == b || *a == *b; }

namespace {

FormulaPtr make_node(Formula::Kind kind) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  return f;
}

FormulaPtr make_node(Formula::Kind kind, std::vector<FormulaPtr> children) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->children = std::move(children);
  return f;
}

}  // namespace

FormulaPtr top() {
  static const FormulaPtr t = make_node(Formula::Kind::True);
  return t;
}

FormulaPtr bottom() {
  static const FormulaPtr f = make_node(Formula::Kind::False);
  return f;
}

FormulaPtr equal(TermPtr lhs, TermPtr rhs) {
  if (lhs->sort != rhs->sort)
    throw SortError("sort mismatch in equality: " + to_string(*lhs) + " : " + lhs->sort.name +
                    " vs " + to_string(*rhs) + " : " + rhs->sort.name);
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Equal;
  f->terms = {std::move(lhs), std::move(rhs)};
  return f;
}

FormulaPtr predicate(const Signature& sig, const std::string& name, std::vector<TermPtr> args) {
  const PredicateSymbol* p = sig.find_predicate(name);
  if (!p) throw SortError("unknown predicate symbol '" + name + "'");
  if (p->args.size() != args.size())
    throw SortError("predicate '" + name + "' expects " + std::to_string(p->args.size()) +
                    " arguments, got " + std::to_string(args.size()));
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i]->sort != p->args[i])
      throw SortError("argument " + std::to_string(i + 1) + " of '" + name + "' has sort " +
                      args[i]->sort.name + ", expected " + p->args[i].name);
  }
  return predicate_unchecked(name, std::move(args));
}

FormulaPtr predicate_unchecked(std::string name, std::vector<TermPtr> args) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Predicate;
  f->symbol = std::move(name);
  f->terms = std::move(args);
  return f;
}

FormulaPtr negation(FormulaPtr f) { return make_node(Formula::Kind::Not, {std::move(f)}); }

FormulaPtr make_and(std::vector<FormulaPtr> children) {
  if (children.empty()) throw Error("'and' needs at least one argument");
  return make_node(Formula::Kind::And, std::move(children));
}

FormulaPtr make_or(std::vector<FormulaPtr> children) {
  if (children.empty()) throw Error("'or' needs at least one argument");
  return make_node(Formula::Kind::Or, std::move(children));
}

FormulaPtr conjunction(std::vector<FormulaPtr> children) {
  if (children.empty()) return top();
  if (children.size() == 1) return children.front();
  return make_and(std::move(children));
}

FormulaPtr disjunction(std::vector<FormulaPtr> children) {
  if (children.empty()) return bottom();
  if (children.size() == 1) return children.front();
  return make_or(std::move(children));
}

FormulaPtr implies(FormulaPtr lhs, FormulaPtr rhs) {
  return make_node(Formula::Kind::Implies, {std::move(lhs), std::move(rhs)});
}

FormulaPtr quantify(Formula::Kind kind, Variable v, FormulaPtr body) {
  if (kind != Formula::Kind::Forall && kind != Formula::Kind::Exists)
    throw Error("quantify: kind is not a quantifier");
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->bound = std::move(v);
  f->children = {std::move(body)};
  return f;
}

FormulaPtr forall(Variable v, FormulaPtr body) {
  return quantify(Formula::Kind::Forall, std::move(v), std::move(body));
}

FormulaPtr exists(Variable v, FormulaPtr body) {
  return quantify(Formula::Kind::Exists, std::move(v), std::move(body));
}

// ---------------------------------------------------------------------------
// Variable sets and traversals
// ---------------------------------------------------------------------------

VariableSet::VariableSet(std::initializer_list<Variable> vars) {
  for (const auto& v : vars) insert(v);
}

void VariableSet::insert(const VariableSet& other) {
  for (const auto& [sort, names] : other.per_sort_) per_sort_[sort].insert(names.begin(), names.end());
}

bool VariableSet::contains(const Variable& v) const {
  auto it = per_sort_.find(v.sort);
  return it != per_sort_.end() && it->second.count(v.name);
}

std::size_t VariableSet::size() const {
  std::size_t n = 0;
  for (const auto& [_, names] : per_sort_) n += names.size();
  return n;
}

std::vector<Sort> VariableSet::sorts() const {
  std::vector<Sort> out;
  for (const auto& [sort, _] : per_sort_) out.push_back(sort);
  return out;
}

std::vector<std::string> VariableSet::of_sort(const Sort& s) const {
  auto it = per_sort_.find(s);
  if (it == per_sort_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::vector<Variable> VariableSet::variables() const {
  std::vector<Variable> out;
  for (const auto& [sort, names] : per_sort_) {
    for (const auto& n : names) out.push_back(Variable{n, sort});
  }
  return out;
}

VariableSet VariableSet::restricted_to(const std::set<Sort>& sorts) const {
  VariableSet out;
  for (const auto& [sort, names] : per_sort_) {
    if (sorts.count(sort)) out.per_sort_[sort] = names;
  }
  return out;
}

namespace {

void collect_free(const Term& t, std::vector<Variable>& bound, VariableSet& out) {
  if (t.kind == Term::Kind::Variable) {
    Variable v = t.variable();
    if (std::find(bound.begin(), bound.end(), v) == bound.end()) out.insert(v);
    return;
  }
  for (const auto& a : t.args) collect_free(*a, bound, out);
}

void collect_free(const Formula& f, std::vector<Variable>& bound, VariableSet& out) {
  for (const auto& t : f.terms) collect_free(*t, bound, out);
  if (f.is_quantifier()) {
    bound.push_back(f.bound);
    collect_free(*f.children[0], bound, out);
    bound.pop_back();
    return;
  }
  for (const auto& c : f.children) collect_free(*c, bound, out);
}

void collect_names(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Variable) out.insert(t.name);
  for (const auto& a : t.args) collect_names(*a, out);
}

void collect_names(const Formula& f, std::set<std::string>& out) {
  for (const auto& t : f.terms) collect_names(*t, out);
  if (f.is_quantifier()) out.insert(f.bound.name);
  for (const auto& c : f.children) collect_names(*c, out);
}

}  // namespace

VariableSet free_vars(const Term& t) {
  std::vector<Variable> bound;
  VariableSet out;
  collect_free(t, bound, out);
  return out;
}

VariableSet free_vars(const Formula& f, const std::optional<std::set<Sort>>& filter) {
  std::vector<Variable> bound;
  VariableSet out;
  collect_free(f, bound, out);
  return filter ? out.restricted_to(*filter) : out;
}

std::set<std::string> all_variable_names(const Formula& f) {
  std::set<std::string> out;
  collect_names(f, out);
  return out;
}

bool is_quantifier_free(const Formula& f) {
  if (f.is_quantifier()) return false;
  return std::all_of(f.children.begin(), f.children.end(),
                     [](const FormulaPtr& c) { return is_quantifier_free(*c); });
}

bool is_sentence(const Formula& f) { return free_vars(f).empty(); }

std::size_t quantifier_rank(const Formula& f) {
  std::size_t r = 0;
  for (const auto& c : f.children) r = std::max(r, quantifier_rank(*c));
  return f.is_quantifier() ? r + 1 : r;
}

namespace {

void collect_sorts(const Term& t, std::set<Sort>& out) {
  out.insert(t.sort);
  for (const auto& a : t.args) collect_sorts(*a, out);
}

void collect_symbols(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Apply) out.insert(t.name);
  for (const auto& a : t.args) collect_symbols(*a, out);
}

std::size_t count_nodes(const Term& t) {
  std::size_t n = 1;
  for (const auto& a : t.args) n += count_nodes(*a);
  return n;
}

}  // namespace

std::set<Sort> sorts_of(const Formula& f) {
  std::set<Sort> out;
  std::function<void(const Formula&)> go = [&](const Formula& g) {
    for (const auto& t : g.terms) collect_sorts(*t, out);
    if (g.is_quantifier()) out.insert(g.bound.sort);
    for (const auto& c : g.children) go(*c);
  };
  go(f);
  return out;
}

std::set<std::string> symbols_of(const Formula& f) {
  std::set<std::string> out;
  std::function<void(const Formula&)> go = [&](const Formula& g) {
    if (g.kind == Formula::Kind::Predicate) out.insert(g.symbol);
    for (const auto& t : g.terms) collect_symbols(*t, out);
    for (const auto& c : g.children) go(*c);
  };
  go(f);
  return out;
}

std::size_t node_count(const Formula& f) {
  std::size_t n = 1;
  for (const auto& t : f.terms) n += count_nodes(*t);
  for (const auto& c : f.children) n += node_count(*c);
  return n;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& used) {
  if (!used.count(base)) return base;
  for (std::size_t i = 0;; ++i) {
    std::string candidate = base + "_" + std::to_string(i);
    if (!used.count(candidate)) return candidate;
  }
}

TermPtr substitute(const TermPtr& t, const std::map<Variable, TermPtr>& subst) {
  if (t->kind == Term::Kind::Variable) {
    auto it = subst.find(t->variable());
    return it == subst.end() ? t : it->second;
  }
  std::vector<TermPtr> args;
  args.reserve(t->args.size());
  bool changed = false;
  for (const auto& a : t->args) {
    args.push_back(substitute(a, subst));
    changed = changed || args.back() != a;
  }
  return changed ? make_app_unchecked(t->name, t->sort, std::move(args)) : t;
}

FormulaPtr substitute(const FormulaPtr& f, const std::map<Variable, TermPtr>& subst) {
  if (subst.empty()) return f;
  if (f->is_quantifier()) {
    std::map<Variable, TermPtr> inner = subst;
    inner.erase(f->bound);
    if (inner.empty()) return f;
    // Names are compared without sorts so printed output stays unambiguous.
    std::set<std::string> incoming;
    for (const auto& [v, term] : inner) {
      for (const auto& fv : free_vars(*term).variables()) incoming.insert(fv.name);
    }
    Variable bound = f->bound;
    FormulaPtr body = f->children[0];
    if (incoming.count(bound.name)) {
      std::set<std::string> used = all_variable_names(*body);
      used.insert(incoming.begin(), incoming.end());
      for (const auto& [v, _] : inner) used.insert(v.name);
      Variable renamed{fresh_name(bound.name, used), bound.sort};
      body = substitute(body, {{bound, make_var(renamed)}});
      bound = renamed;
    }
    return quantify(f->kind, bound, substitute(body, inner));
  }
  auto out = std::make_shared<Formula>(*f);
  bool changed = false;
  for (auto& t : out->terms) {
    auto n = substitute(t, subst);
    changed = changed || n != t;
    t = n;
  }
  for (auto& c : out->children) {
    auto n = substitute(c, subst);
    changed = changed || n != c;
    c = n;
  }
  return changed ? out : f;
}

namespace {

void check_term(const Term& t, const Signature& sig) {
  if (!sig.has_sort(t.sort)) throw SortError("undeclared sort '" + t.sort.name + "'");
  if (t.kind == Term::Kind::Variable) return;
  const FunctionSymbol* fn = sig.find_function(t.name);
  if (!fn) throw SortError("unknown function symbol '" + t.name + "'");
  if (fn->args.size() != t.args.size() || fn->result != t.sort)
    throw SortError("ill-sorted application of '" + t.name + "'");
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    check_term(*t.args[i], sig);
    if (t.args[i]->sort != fn->args[i])
      throw SortError("argument " + std::to_string(i + 1) + " of '" + t.name + "' has sort " +
                      t.args[i]->sort.name + ", expected " + fn->args[i].name);
  }
}

}  // namespace

void sort_check(const Formula& f, const Signature& sig) {
  for (const auto& t : f.terms) check_term(*t, sig);
  switch (f.kind) {
    case Formula::Kind::Equal:
      if (f.terms.size() != 2 || f.terms[0]->sort != f.terms[1]->sort)
        throw SortError("sort mismatch in equality");
      break;
    case Formula::Kind::Predicate: {
      const PredicateSymbol* p = sig.find_predicate(f.symbol);
      if (!p) throw SortError("unknown predicate symbol '" + f.symbol + "'");
      if (p->args.size() != f.terms.size())
        throw SortError("predicate '" + f.symbol + "' applied to wrong number of arguments");
      for (std::size_t i = 0; i < f.terms.size(); ++i) {
        if (f.terms[i]->sort != p->args[i])
          throw SortError("argument " + std::to_string(i + 1) + " of '" + f.symbol +
                          "' has sort " + f.terms[i]->sort.name + ", expected " + p->args[i].name);
      }
      break;
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
      if (!sig.has_sort(f.bound.sort))
        throw SortError("undeclared sort '" + f.bound.sort.name + "' for bound variable");
      break;
    default:
      break;
  }
  for (const auto& c : f.children) sort_check(*c, sig);
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

namespace {

void print_term(const Term& t, std::string& out) {
  if (t.args.empty()) {
    out += t.name;
    return;
  }
  out += '(';
  out += t.name;
  for (const auto& a : t.args) {
    out += ' ';
    print_term(*a, out);
  }
  out += ')';
}

void print(const Formula& f, std::string& out) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::True:
      out += "true";
      return;
    case K::False:
      out += "false";
      return;
    case K::Equal:
      out += "(= ";
      print_term(*f.terms[0], out);
      out += ' ';
      print_term(*f.terms[1], out);
      out += ')';
      return;
    case K::Predicate:
      if (f.terms.empty()) {
        out += f.symbol;
        return;
      }
      out += '(';
      out += f.symbol;
      for (const auto& t : f.terms) {
        out += ' ';
        print_term(*t, out);
      }
      out += ')';
      return;
    case K::Not:
    case K::And:
    case K::Or:
    case K::Implies:
      out += f.kind == K::Not ? "(not" : f.kind == K::And ? "(and" : f.kind == K::Or ? "(or" : "(=>";
      for (const auto& c : f.children) {
        out += ' ';
        print(*c, out);
      }
      out += ')';
      return;
    case K::Forall:
    case K::Exists: {
      out += f.kind == K::Forall ? "(forall (" : "(exists (";
      const Formula* cur = &f;
      while (true) {
        out += '(';
        out += cur->bound.name;
        out += ' ';
        out += cur->bound.sort.name;
        out += ')';
        const Formula& body = *cur->children[0];
        if (body.kind != f.kind) break;
        cur = &body;
      }
      out += ") ";
      print(*cur->children[0], out);
      out += ')';
      return;
    }
  }
}

}  // namespace

std::string to_string(const Term& t) {
  std::string out;
  print_term(t, out);
  return out;
}

std::string to_string(const Formula& f) {
  std::string out;
  print(f, out);
  return out;
}

std::string print_signature(const Signature& sig) {
  std::string out;
  for (const Sort& s : sig.sorts()) out += "(sort " + s.name + ")\n";
  if (sig.split()) {
    out += "(split (";
    for (std::size_t b = 0; b < sig.split()->size(); ++b) {
      if (b) out += ' ';
      out += '(' + join_sorts((*sig.split())[b]) + ')';
    }
    out += "))\n";
  }
  for (const auto& f : sig.functions())
    out += "(declare-fun " + f.name + " (" + join_sorts(f.args) + ") " + f.result.name + ")\n";
  for (const auto& p : sig.predicates())
    out += "(declare-pred " + p.name + " (" + join_sorts(p.args) + "))\n";
  return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

std::string at(const SExpr& e, const std::string& message) {
  return std::to_string(e.pos.line) + ":" + std::to_string(e.pos.column) + ": " + message;
}

class FormulaParser {
 public:
  FormulaParser(const Signature& sig, const VariableScope& declared) : sig_(sig), declared_(declared) {}

  TermPtr term(const SExpr& e) {
    if (e.is_atom()) {
      for (auto it = bound_.rbegin(); it != bound_.rend(); ++it) {
        if (it->name == e.atom) return make_var(*it);
      }
      if (auto d = declared_.find(e.atom); d != declared_.end()) return make_var(e.atom, d->second);
      if (const FunctionSymbol* f = sig_.find_function(e.atom)) {
        if (!f->args.empty())
          throw SortError(at(e, "function '" + e.atom + "' needs " +
                                    std::to_string(f->args.size()) + " arguments"));
        return make_app_unchecked(f->name, f->result, {});
      }
      throw ParseError("unbound variable '" + e.atom + "'", e.pos);
    }
    if (e.items.empty() || !e.items[0].is_atom()) throw ParseError("expected a term", e.pos);
    const std::string& name = e.items[0].atom;
    const FunctionSymbol* f = sig_.find_function(name);
    if (!f) throw ParseError("unknown function symbol '" + name + "'", e.items[0].pos);
    std::vector<TermPtr> args;
    for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(term(e.items[i]));
    try {
      return make_app(sig_, name, std::move(args));
    } catch (const SortError& err) {
      throw SortError(at(e, err.what()));
    }
  }

  FormulaPtr formula(const SExpr& e) {
    if (e.is_atom()) {
      if (e.atom == "true") return top();
      if (e.atom == "false") return bottom();
      if (const PredicateSymbol* p = sig_.find_predicate(e.atom)) {
        if (!p->args.empty())
          throw SortError(at(e, "predicate '" + e.atom + "' needs " +
                                    std::to_string(p->args.size()) + " arguments"));
        return predicate_unchecked(p->name, {});
      }
      throw ParseError("expected a formula, got '" + e.atom + "'", e.pos);
    }
    if (e.items.empty() || !e.items[0].is_atom()) throw ParseError("expected a formula", e.pos);
    const std::string& head = e.items[0].atom;
    const std::size_t n = e.items.size() - 1;
    auto children = [&](std::size_t from) {
      std::vector<FormulaPtr> out;
      for (std::size_t i = from; i < e.items.size(); ++i) out.push_back(formula(e.items[i]));
      return out;
    };
    if (head == "not") {
      if (n != 1) throw ParseError("'not' takes one argument", e.pos);
      return negation(formula(e.items[1]));
    }
    if (head == "and" || head == "or") {
      if (n == 0) throw ParseError("'" + head + "' needs at least one argument", e.pos);
      return head == "and" ? make_and(children(1)) : make_or(children(1));
    }
    if (head == "=>") {
      if (n < 2) throw ParseError("'=>' needs at least two arguments", e.pos);
      auto cs = children(1);
      FormulaPtr acc = cs.back();
      for (std::size_t i = cs.size() - 1; i-- > 0;) acc = implies(cs[i], acc);
      return acc;
    }
    if (head == "=") {
      if (n != 2) throw ParseError("'=' takes two arguments", e.pos);
      TermPtr lhs = term(e.items[1]);
      TermPtr rhs = term(e.items[2]);
      if (lhs->sort != rhs->sort)
        throw SortError(at(e, "sort mismatch in equality: " + lhs->sort.name + " vs " +
                                  rhs->sort.name));
      return equal(lhs, rhs);
    }
    if (head == "forall" || head == "exists") return quantifier(e, head == "forall");
    const PredicateSymbol* p = sig_.find_predicate(head);
    if (!p) throw ParseError("unknown predicate or connective '" + head + "'", e.items[0].pos);
    std::vector<TermPtr> args;
    for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(term(e.items[i]));
    try {
      return predicate(sig_, head, std::move(args));
    } catch (const SortError& err) {
      throw SortError(at(e, err.what()));
    }
  }

 private:
  FormulaPtr quantifier(const SExpr& e, bool universal) {
    if (e.items.size() != 3 || !e.items[1].is_list() || e.items[1].items.empty())
      throw ParseError("expected (" + e.items[0].atom + " ((var Sort)...) body)", e.pos);
    std::vector<Variable> vars;
    for (const SExpr& b : e.items[1].items) {
      if (!b.is_list() || b.items.size() != 2 || !b.items[0].is_atom() || !b.items[1].is_atom())
        throw ParseError("malformed binder, expected (name Sort)", b.pos);
      if (!valid_identifier(b.items[0].atom))
        throw ParseError("invalid variable name '" + b.items[0].atom + "'", b.items[0].pos);
      Sort s{b.items[1].atom};
      if (!sig_.has_sort(s)) throw SortError(at(b.items[1], "undeclared sort '" + s.name + "'"));
      vars.push_back(Variable{b.items[0].atom, s});
    }
    for (const auto& v : vars) bound_.push_back(v);
    FormulaPtr body = formula(e.items[2]);
    bound_.resize(bound_.size() - vars.size());
    for (std::size_t i = vars.size(); i-- > 0;)
      body = universal ? forall(vars[i], body) : exists(vars[i], body);
    return body;
  }

  const Signature& sig_;
  const VariableScope& declared_;
  std::vector<Variable> bound_;
};

const SExpr& atom_arg(const SExpr& e, std::size_t i, const char* what) {
  if (i >= e.items.size() || !e.items[i].is_atom())
    throw ParseError(std::string("expected ") + what, i < e.items.size() ? e.items[i].pos : e.pos);
  return e.items[i];
}

std::vector<Sort> sort_list(const SExpr& e) {
  if (!e.is_list()) throw ParseError("expected a sort list", e.pos);
  std::vector<Sort> out;
  for (const SExpr& s : e.items) {
    if (!s.is_atom()) throw ParseError("expected a sort name", s.pos);
    out.push_back(Sort{s.atom});
  }
  return out;
}

void reject_reserved(const SExpr& name) {
  if (name.atom.rfind(kSkolemPrefix, 0) == 0)
    throw ParseError("symbol '" + name.atom + "' uses the reserved prefix '" +
                         std::string(kSkolemPrefix) + "'",
                     name.pos);
}

template <typename F>
void with_position(const SExpr& e, F&& f) {
  try {
    f();
  } catch (const SignatureError& err) {
    throw ParseError(err.what(), e.pos);
  }
}

}  // namespace

Document parse_document(std::string_view text) {
  Document doc;
  for (const SExpr& e : parse_sexprs(text)) {
    if (!e.is_list() || e.items.empty() || !e.items[0].is_atom())
      throw ParseError("expected a declaration", e.pos);
    const std::string& head = e.items[0].atom;
    if (head == "sort") {
      if (e.items.size() != 2) throw ParseError("expected (sort Name)", e.pos);
      const SExpr& name = atom_arg(e, 1, "a sort name");
      with_position(name, [&] { doc.signature.add_sort(name.atom); });
    } else if (head == "split") {
      if (e.items.size() != 2 || !e.items[1].is_list())
        throw ParseError("expected (split ((A B) (C) ...))", e.pos);
      Signature::Split blocks;
      for (const SExpr& b : e.items[1].items) blocks.push_back(sort_list(b));
      with_position(e, [&] { doc.signature.set_split(std::move(blocks)); });
    } else if (head == "declare-fun") {
      if (e.items.size() != 4) throw ParseError("expected (declare-fun f (Args...) Result)", e.pos);
      const SExpr& name = atom_arg(e, 1, "a function name");
      reject_reserved(name);
      const SExpr& result = atom_arg(e, 3, "a result sort");
      if (doc.variables.count(name.atom))
        throw ParseError("'" + name.atom + "' is already a declared variable", name.pos);
      with_position(name, [&] {
        doc.signature.add_function(FunctionSymbol{name.atom, sort_list(e.items[2]), Sort{result.atom}});
      });
    } else if (head == "declare-pred") {
      if (e.items.size() != 3) throw ParseError("expected (declare-pred P (Args...))", e.pos);
      const SExpr& name = atom_arg(e, 1, "a predicate name");
      reject_reserved(name);
      if (doc.variables.count(name.atom))
        throw ParseError("'" + name.atom + "' is already a declared variable", name.pos);
      with_position(name, [&] {
        doc.signature.add_predicate(PredicateSymbol{name.atom, sort_list(e.items[2])});
      });
    } else if (head == "declare-var") {
      if (e.items.size() != 3) throw ParseError("expected (declare-var x Sort)", e.pos);
      const SExpr& name = atom_arg(e, 1, "a variable name");
      const SExpr& sort = atom_arg(e, 2, "a sort name");
      if (!valid_identifier(name.atom)) throw ParseError("invalid variable name '" + name.atom + "'", name.pos);
      if (doc.variables.count(name.atom) || doc.signature.has_symbol(name.atom))
        throw ParseError("duplicate declaration of '" + name.atom + "'", name.pos);
      if (!doc.signature.has_sort(Sort{sort.atom}))
        throw SortError(at(sort, "undeclared sort '" + sort.atom + "'"));
      doc.variables.emplace(name.atom, Sort{sort.atom});
    } else if (head == "assert") {
      if (e.items.size() != 2) throw ParseError("expected (assert formula)", e.pos);
      FormulaParser p(doc.signature, doc.variables);
      doc.assertions.push_back(p.formula(e.items[1]));
    } else {
      throw ParseError("unknown declaration '" + head + "'", e.items[0].pos);
    }
  }
  return doc;
}

Signature parse_signature(std::string_view text) { return parse_document(text).signature; }

FormulaPtr parse_formula(std::string_view text, const Signature& sig, const VariableScope& declared) {
  SExpr e = parse_single_sexpr(text);
  FormulaParser p(sig, declared);
  return p.formula(e);
}

TermPtr parse_term(std::string_view text, const Signature& sig, const VariableScope& declared) {
  SExpr e = parse_single_sexpr(text);
  FormulaParser p(sig, declared);
  return p.term(e);
}

}  // namespace msk
