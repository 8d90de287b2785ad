#include "msortkit/semantics.hpp"

#include <algorithm>

namespace msk {

// ---------------------------------------------------------------------------
// Reference evaluator
// ---------------------------------------------------------------------------

Element eval_term(const Structure& A, const Assignment& nu, const Term& t) {
  if (t.kind == Term::Kind::Variable) {
    auto it = nu.find(t.variable());
    if (it == nu.end()) throw EvalError("no value for variable '" + t.name + "'");
    if (it->second >= A.size(t.sort))
      throw EvalError("value of '" + t.name + "' lies outside its domain");
    return it->second;
  }
  auto f = A.signature().function_index(t.name);
  if (!f) throw EvalError("unknown function symbol '" + t.name + "'");
  std::vector<Element> args;
  args.reserve(t.args.size());
  for (const auto& a : t.args) args.push_back(eval_term(A, nu, *a));
  return A.apply(*f, args);
}

namespace {

bool eval_formula(const Structure& A, Assignment& nu, const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::True:
      return true;
    case K::False:
      return false;
    case K::Equal:
      return eval_term(A, nu, *f.terms[0]) == eval_term(A, nu, *f.terms[1]);
    case K::Predicate: {
      auto p = A.signature().predicate_index(f.symbol);
      if (!p) throw EvalError("unknown predicate symbol '" + f.symbol + "'");
      std::vector<Element> args;
      for (const auto& t : f.terms) args.push_back(eval_term(A, nu, *t));
      return A.holds(*p, args);
    }
    case K::Not:
      return !eval_formula(A, nu, *f.children[0]);
    case K::And:
      return std::all_of(f.children.begin(), f.children.end(),
                         [&](const FormulaPtr& c) { return eval_formula(A, nu, *c); });
    case K::Or:
      return std::any_of(f.children.begin(), f.children.end(),
                         [&](const FormulaPtr& c) { return eval_formula(A, nu, *c); });
    case K::Implies:
      return !eval_formula(A, nu, *f.children[0]) || eval_formula(A, nu, *f.children[1]);
    case K::Forall:
    case K::Exists: {
      const bool universal = f.kind == K::Forall;
      std::optional<Element> saved;
      if (auto it = nu.find(f.bound); it != nu.end()) saved = it->second;
      bool result = universal;
      const std::size_t n = A.size(f.bound.sort);
      for (std::size_t e = 0; e < n; ++e) {
        nu[f.bound] = static_cast<Element>(e);
        if (eval_formula(A, nu, *f.children[0]) != universal) {
          result = !universal;
          break;
        }
      }
      if (saved) {
        nu[f.bound] = *saved;
      } else {
        nu.erase(f.bound);
      }
      return result;
    }
  }
  return false;
}

}  // namespace

bool satisfies(const Structure& A, const Assignment& nu, const Formula& f) {
  Assignment scratch = nu;
  return eval_formula(A, scratch, f);
}

// ---------------------------------------------------------------------------
// Compiled evaluator
// ---------------------------------------------------------------------------

struct CompiledFormula::Impl {
  struct TermNode {
    bool is_var = false;
    std::size_t index = 0;  // slot or function index
    std::vector<std::size_t> args;  // indices into terms
  };
  struct Node {
    Formula::Kind kind = Formula::Kind::True;
    std::size_t index = 0;  // predicate index, or slot for quantifiers
    std::size_t sort = 0;   // quantifier sort
    std::vector<std::size_t> terms;
    std::vector<std::size_t> children;
  };

  std::vector<TermNode> terms;
  std::vector<Node> nodes;
  std::size_t root = 0;
  std::size_t slots = 0;

  std::size_t compile_term(const Term& t, const Signature& sig, const std::vector<std::pair<Variable, std::size_t>>& scope) {
    TermNode n;
    if (t.kind == Term::Kind::Variable) {
      n.is_var = true;
      Variable v = t.variable();
      auto it = std::find_if(scope.rbegin(), scope.rend(), [&](const auto& p) { return p.first == v; });
      if (it == scope.rend()) throw EvalError("no slot for free variable '" + t.name + "'");
      n.index = it->second;
    } else {
      auto f = sig.function_index(t.name);
      if (!f) throw EvalError("unknown function symbol '" + t.name + "'");
      n.index = *f;
      for (const auto& a : t.args) n.args.push_back(compile_term(*a, sig, scope));
    }
    terms.push_back(std::move(n));
    return terms.size() - 1;
  }

  std::size_t compile(const Formula& f, const Signature& sig, std::vector<std::pair<Variable, std::size_t>>& scope) {
    Node n;
    n.kind = f.kind;
    if (f.kind == Formula::Kind::Predicate) {
      auto p = sig.predicate_index(f.symbol);
      if (!p) throw EvalError("unknown predicate symbol '" + f.symbol + "'");
      n.index = *p;
    }
    for (const auto& t : f.terms) n.terms.push_back(compile_term(*t, sig, scope));
    if (f.is_quantifier()) {
      n.index = slots++;
      n.sort = sig.sort_index(f.bound.sort);
      scope.emplace_back(f.bound, n.index);
      n.children.push_back(compile(*f.children[0], sig, scope));
      scope.pop_back();
    } else {
      for (const auto& c : f.children) n.children.push_back(compile(*c, sig, scope));
    }
    nodes.push_back(std::move(n));
    return nodes.size() - 1;
  }

  Element term(const Structure& A, const std::vector<Element>& env, std::size_t i) const {
    const TermNode& t = terms[i];
    if (t.is_var) return env[t.index];
    Element buf[8];
    std::vector<Element> big;
    Element* args = buf;
    if (t.args.size() > 8) {
      big.resize(t.args.size());
      args = big.data();
    }
    for (std::size_t k = 0; k < t.args.size(); ++k) args[k] = term(A, env, t.args[k]);
    return A.apply(t.index, std::span<const Element>(args, t.args.size()));
  }

  bool eval(const Structure& A, std::vector<Element>& env, std::size_t i) const {
    const Node& n = nodes[i];
    using K = Formula::Kind;
    switch (n.kind) {
      case K::True:
        return true;
      case K::False:
        return false;
      case K::Equal:
        return term(A, env, n.terms[0]) == term(A, env, n.terms[1]);
      case K::Predicate: {
        Element buf[8];
        std::vector<Element> big;
        Element* args = buf;
        if (n.terms.size() > 8) {
          big.resize(n.terms.size());
          args = big.data();
        }
        for (std::size_t k = 0; k < n.terms.size(); ++k) args[k] = term(A, env, n.terms[k]);
        return A.holds(n.index, std::span<const Element>(args, n.terms.size()));
      }
      case K::Not:
        return !eval(A, env, n.children[0]);
      case K::And:
        for (std::size_t c : n.children) {
          if (!eval(A, env, c)) return false;
        }
        return true;
      case K::Or:
        for (std::size_t c : n.children) {
          if (eval(A, env, c)) return true;
        }
        return false;
      case K::Implies:
        return !eval(A, env, n.children[0]) || eval(A, env, n.children[1]);
      case K::Forall:
      case K::Exists: {
        const bool universal = n.kind == K::Forall;
        const std::size_t size = A.size(n.sort);
        for (std::size_t e = 0; e < size; ++e) {
          env[n.index] = static_cast<Element>(e);
          if (eval(A, env, n.children[0]) != universal) return !universal;
        }
        return universal;
      }
    }
    return false;
  }
};

CompiledFormula::CompiledFormula(const Formula& f, const Signature& sig, std::vector<Variable> free_order)
    : free_order_(std::move(free_order)), impl_(std::make_unique<Impl>()) {
  std::vector<std::pair<Variable, std::size_t>> scope;
  for (const auto& v : free_order_) scope.emplace_back(v, impl_->slots++);
  impl_->root = impl_->compile(f, sig, scope);
}

CompiledFormula::~CompiledFormula() = default;
CompiledFormula::CompiledFormula(CompiledFormula&&) noexcept = default;
CompiledFormula& CompiledFormula::operator=(CompiledFormula&&) noexcept = default;

std::size_t CompiledFormula::slot_count() const { return impl_->slots; }

bool CompiledFormula::eval(const Structure& A, std::vector<Element>& env) const {
  return impl_->eval(A, env, impl_->root);
}

bool CompiledFormula::eval(const Structure& A, const Assignment& nu) const {
  std::vector<Element> env(impl_->slots, 0);
  for (std::size_t i = 0; i < free_order_.size(); ++i) {
    auto it = nu.find(free_order_[i]);
    if (it == nu.end()) throw EvalError("no value for variable '" + free_order_[i].name + "'");
    env[i] = it->second;
  }
  return eval(A, env);
}

void for_each_assignment(const Structure& A, const std::vector<Variable>& vars,
                         const std::function<bool(const Assignment&)>& visit) {
  std::vector<std::size_t> limits;
  for (const auto& v : vars) limits.push_back(A.size(v.sort));
  std::vector<Element> cur(vars.size(), 0);
  Assignment nu;
  for (;;) {
    for (std::size_t i = 0; i < vars.size(); ++i) nu[vars[i]] = cur[i];
    if (!visit(nu)) return;
    std::size_t i = vars.size();
    while (i > 0) {
      --i;
      if (++cur[i] < limits[i]) break;
      cur[i] = 0;
      if (i == 0) return;
    }
    if (vars.empty()) return;
  }
}

}  // namespace msk
