#include <algorithm>
#include <numeric>

#include "msortkit/combination.hpp"
#include "msortkit/transforms.hpp"

namespace msk {

namespace {

void flatten_and(const Formula& f, std::vector<const Formula*>& out) {
  if (f.kind == Formula::Kind::And) {
    for (const auto& c : f.children) flatten_and(*c, out);
  } else {
    out.push_back(&f);
  }
}

// Per sort index, the number of classes of free variables once the variable
// equalities among the top-level conjuncts are merged.
std::vector<std::size_t> variable_classes(const Formula& phi, const Signature& sig) {
  const std::vector<Variable> vars = free_vars(phi).variables();
  std::map<Variable, std::size_t> index;
  for (const auto& v : vars) index.emplace(v, index.size());
  std::vector<std::size_t> parent(vars.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<const Formula*> conjuncts;
  flatten_and(phi, conjuncts);
  for (const Formula* c : conjuncts) {
    if (c->kind != Formula::Kind::Equal) continue;
    const Term& a = *c->terms[0];
    const Term& b = *c->terms[1];
    if (a.kind != Term::Kind::Variable || b.kind != Term::Kind::Variable) continue;
    parent[find(index.at(a.variable()))] = find(index.at(b.variable()));
  }
  std::vector<std::size_t> classes(sig.sort_count(), 0);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (find(i) == i) ++classes[sig.sort_index(vars[i].sort)];
  }
  return classes;
}

SizeBounds capped(SizeBounds bounds, std::size_t cap) {
  if (cap == 0) return bounds;
  for (auto& h : bounds.hi) h = std::min(h, cap);
  return bounds;
}

}  // namespace

bool TheorySolver::complete_for(const Formula& phi, const SizeBounds& bounds) const {
  const Signature& sig = *theory.signature;
  if (!sig.is_empty()) return false;
  std::size_t rank = quantifier_rank(phi);
  for (const auto& ax : theory.axioms) rank = std::max(rank, quantifier_rank(*ax));
  const auto classes = variable_classes(phi, sig);
  for (std::size_t s = 0; s < sig.sort_count(); ++s) {
    const std::size_t need = std::max({bounds.lo[s], rank, classes[s], std::size_t{1}});
    if (bounds.hi[s] < need) return false;
  }
  return true;
}

SolveResult TheorySolver::solve(const FormulaPtr& phi, const SizeBounds& bounds) const {
  const SizeBounds b = capped(bounds, size_cap);
  for (std::size_t s = 0; s < b.lo.size(); ++s) {
    if (b.lo[s] > b.hi[s]) return SolveResult{std::nullopt, false};
  }
  SolveResult r;
  r.witness = check_sat(theory, *phi, b, enumeration);
  if (!r.witness) r.conclusive = complete_for(*phi, b);
  return r;
}

SolveResult TheorySolver::solve(const FormulaPtr& phi, std::size_t bound) const {
  return solve(phi, SizeBounds::uniform(theory.signature->sort_count(), bound));
}

FormulaPtr wit_empty_theory(const FormulaPtr& phi, const std::set<Sort>& shared, const Signature& sig) {
  if (!sig.is_empty()) throw SignatureError("the empty-theory witness needs a signature without symbols");
  if (!is_quantifier_free(*phi)) throw Error("witness functions take quantifier-free formulas");
  if (shared.empty()) return phi;
  std::set<std::string> used = all_variable_names(*phi);
  std::vector<FormulaPtr> parts{phi};
  for (const Sort& s : shared) {
    const std::string name = fresh_name("w_" + s.name, used);
    used.insert(name);
    auto w = make_var(name, s);
    parts.push_back(equal(w, w));
  }
  return make_and(std::move(parts));
}

TheorySolver empty_theory_solver(const std::vector<Sort>& sorts, const std::set<Sort>& shared) {
  auto sig = std::make_shared<Signature>();
  for (const Sort& s : sorts) sig->add_sort(s.name);
  TheorySolver T;
  T.theory.signature = sig;
  T.theory.designated = shared;
  T.designated = shared;
  T.wit = [shared, sig](const FormulaPtr& phi) { return wit_empty_theory(phi, shared, *sig); };
  return T;
}

TheorySolver exact_cardinality_solver(const Sort& s, std::size_t n) {
  auto sig = std::make_shared<Signature>();
  sig->add_sort(s.name);
  TheorySolver T;
  T.theory.signature = sig;
  T.theory.axioms.push_back(exact_cardinality_formula(s, n));
  T.designated = {s};
  T.theory.designated = T.designated;
  return T;
}

WitnessReport check_witness_function(const TheorySolver& T, const FormulaPtr& phi, std::size_t max_size,
                                     std::size_t extra_vars) {
  if (!T.wit) throw Error("theory has no witness function");
  const Signature& sig = *T.theory.signature;
  const FormulaPtr psi = T.wit(phi);
  const std::vector<Variable> phi_vars = free_vars(*phi).variables();
  const VariableSet psi_vars = free_vars(*psi);

  FormulaPtr closed = psi;
  for (const Variable& v : psi_vars.variables()) {
    if (!free_vars(*phi).contains(v)) closed = exists(v, closed);
  }
  const CompiledFormula lhs(*phi, sig, phi_vars);
  const CompiledFormula rhs(*closed, sig, phi_vars);

  WitnessReport report;
  for (const Structure& A : enumerate_models(T.theory, SizeBounds::uniform(sig.sort_count(), max_size),
                                             T.enumeration)) {
    for_each_assignment(A, phi_vars, [&](const Assignment& nu) {
      ++report.assignments_checked;
      if (lhs.eval(A, nu) != rhs.eval(A, nu)) {
        report.violations.push_back("wit changes the truth value at sizes " + [&] {
          std::string s;
          for (std::size_t x : A.sizes()) s += (s.empty() ? "" : ",") + std::to_string(x);
          return s;
        }() + " under " + print_assignment(nu));
        return false;
      }
      return true;
    });
  }

  // V runs over vars(ψ) on the designated sorts plus 0..extra_vars fresh
  // variables of each designated sort.
  std::set<std::string> used = all_variable_names(*psi);
  std::vector<VariableSet> universes{psi_vars.restricted_to(T.designated)};
  for (std::size_t k = 1; k <= extra_vars; ++k) {
    VariableSet next = universes.back();
    for (const Sort& s : T.designated) {
      const std::string name = fresh_name("v_" + s.name, used);
      used.insert(name);
      next.insert(Variable{name, s});
    }
    universes.push_back(std::move(next));
  }
  for (const VariableSet& V : universes) {
    for_each_arrangement(V, [&](const Arrangement& delta) {
      ++report.arrangements_checked;
      const FormulaPtr f = conjunction({psi, arrangement_formula(delta)});
      auto sat = check_sat(T.theory, *f, max_size, T.enumeration);
      if (!sat) return true;
      // Designated domains must be exactly the values of V.
      const Structure& A = sat->structure;
      std::vector<std::set<Element>> seeds(sig.sort_count());
      for (std::size_t s = 0; s < sig.sort_count(); ++s) {
        if (T.designated.count(sig.sorts()[s])) continue;
        for (Element e = 0; e < A.size(s); ++e) seeds[s].insert(e);
      }
      for (const auto& [v, e] : sat->assignment) {
        if (T.designated.count(v.sort)) seeds[sig.sort_index(v.sort)].insert(e);
      }
      bool shrunk = false;
      try {
        Substructure sub = generated_substructure(A, seeds);
        bool onto = true;
        for (std::size_t s = 0; s < sig.sort_count(); ++s) {
          if (T.designated.count(sig.sorts()[s]) && sub.structure.size(s) != seeds[s].size()) onto = false;
        }
        Assignment mapped;
        for (const auto& [v, e] : sat->assignment) {
          const auto& emb = sub.embedding[sig.sort_index(v.sort)];
          mapped[v] = static_cast<Element>(std::find(emb.begin(), emb.end(), e) - emb.begin());
        }
        shrunk = onto && satisfies_theory(sub.structure, T.theory) && satisfies(sub.structure, mapped, *f);
      } catch (const EvalError&) {
        shrunk = false;  // some designated sort has no variable
      }
      if (!shrunk) {
        // Another model may still work: fix each designated domain to its block count.
        SizeBounds exact = SizeBounds::uniform(sig.sort_count(), max_size);
        bool possible = true;
        for (std::size_t s = 0; s < sig.sort_count(); ++s) {
          const Sort& sort = sig.sorts()[s];
          if (!T.designated.count(sort)) continue;
          auto it = delta.per_sort.find(sort);
          const std::size_t blocks = it == delta.per_sort.end() ? 0 : it->second.size();
          if (blocks == 0) possible = false;
          exact.lo[s] = exact.hi[s] = blocks;
        }
        shrunk = possible && check_sat(T.theory, *f, exact, T.enumeration).has_value();
      }
      if (!shrunk)
        report.violations.push_back("no model of wit(phi) with " + print_arrangement(delta) +
                                    " whose designated domains are the variable values");
      return true;
    });
  }
  return report;
}

}  // namespace msk
