#include <algorithm>

#include "msortkit/transforms.hpp"

namespace msk {

FormulaPtr Prenex::formula() const {
  FormulaPtr f = matrix;
  for (std::size_t i = prefix.size(); i-- > 0;) f = quantify(prefix[i].first, prefix[i].second, f);
  return f;
}

namespace {

Formula::Kind dual(Formula::Kind k) {
  return k == Formula::Kind::Forall ? Formula::Kind::Exists : Formula::Kind::Forall;
}

class PrenexBuilder {
 public:
  explicit PrenexBuilder(const Formula& root) {
    for (const auto& v : free_vars(root).variables()) taken_.insert(v.name);
    avoid_ = all_variable_names(root);
    const auto symbols = symbols_of(root);
    avoid_.insert(symbols.begin(), symbols.end());
  }

  Prenex build(const FormulaPtr& f) {
    using K = Formula::Kind;
    if (is_quantifier_free(*f)) return {{}, f};
    switch (f->kind) {
      case K::Forall:
      case K::Exists: {
        Variable v = f->bound;
        FormulaPtr body = f->children[0];
        if (taken_.count(v.name)) {
          Variable renamed{next_name(v.name), v.sort};
          body = substitute(body, {{v, make_var(renamed)}});
          v = renamed;
        }
        taken_.insert(v.name);
        Prenex inner = build(body);
        inner.prefix.insert(inner.prefix.begin(), {f->kind, v});
        return inner;
      }
      case K::Not: {
        Prenex inner = build(f->children[0]);
        for (auto& q : inner.prefix) q.first = dual(q.first);
        inner.matrix = negation(inner.matrix);
        return inner;
      }
      case K::Implies: {
        Prenex lhs = build(f->children[0]);
        for (auto& q : lhs.prefix) q.first = dual(q.first);
        Prenex rhs = build(f->children[1]);
        lhs.prefix.insert(lhs.prefix.end(), rhs.prefix.begin(), rhs.prefix.end());
        return {std::move(lhs.prefix), implies(lhs.matrix, rhs.matrix)};
      }
      case K::And:
      case K::Or: {
        Prenex out;
        std::vector<FormulaPtr> matrices;
        for (const auto& c : f->children) {
          Prenex p = build(c);
          out.prefix.insert(out.prefix.end(), p.prefix.begin(), p.prefix.end());
          matrices.push_back(p.matrix);
        }
        out.matrix = f->kind == K::And ? make_and(std::move(matrices)) : make_or(std::move(matrices));
        return out;
      }
      default:
        return {{}, f};
    }
  }

 private:
  std::string next_name(const std::string& base) {
    for (;;) {
      std::string candidate = base + "_" + std::to_string(counter_++);
      if (!taken_.count(candidate) && !avoid_.count(candidate)) return candidate;
    }
  }

  std::set<std::string> taken_;
  std::set<std::string> avoid_;
  std::size_t counter_ = 0;
};

}  // namespace

Prenex to_prenex(const FormulaPtr& phi) { return PrenexBuilder(*phi).build(phi); }

FormulaPtr to_pnf(const FormulaPtr& phi) {
  if (is_quantifier_free(*phi)) return phi;
  return to_prenex(phi).formula();
}

Skolemized skolemize(const FormulaPtr& phi, const Signature& sig) {
  for (const auto& f : sig.functions()) {
    if (f.name.rfind(kSkolemPrefix, 0) == 0)
      throw SignatureError("signature already uses the reserved prefix: '" + f.name + "'");
  }
  for (const auto& p : sig.predicates()) {
    if (p.name.rfind(kSkolemPrefix, 0) == 0)
      throw SignatureError("signature already uses the reserved prefix: '" + p.name + "'");
  }
  if (!is_sentence(*phi)) throw SortError("only sentences can be skolemized");
  sort_check(*phi, sig);

  Prenex p = to_prenex(phi);
  // Skolem functions may mix blocks, so the split is not carried over.
  Skolemized out{Signature::merge(sig, Signature{}), nullptr, {}};
  std::vector<Variable> universals;
  std::map<Variable, TermPtr> subst;
  for (const auto& [kind, v] : p.prefix) {
    if (kind == Formula::Kind::Forall) {
      universals.push_back(v);
      continue;
    }
    FunctionSymbol sk{std::string(kSkolemPrefix) + std::to_string(out.skolem_functions.size()), {}, v.sort};
    std::vector<TermPtr> args;
    for (const auto& u : universals) {
      sk.args.push_back(u.sort);
      args.push_back(make_var(u));
    }
    subst[v] = make_app_unchecked(sk.name, sk.result, std::move(args));
    out.signature.add_function(sk);
    out.skolem_functions.push_back(std::move(sk));
  }
  // Prefix variables are pairwise distinct, so one simultaneous substitution
  // into the quantifier-free matrix is capture-free.
  FormulaPtr body = substitute(p.matrix, subst);
  for (std::size_t i = universals.size(); i-- > 0;) body = forall(universals[i], body);
  out.sentence = body;
  return out;
}

}  // namespace msk
