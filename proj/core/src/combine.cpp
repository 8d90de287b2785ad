// Combination of two theories that share only sorts.
//
// Every procedure walks the arrangements of the shared variables in
// enumeration order and stops at the first one both sides accept. A negative
// answer is reported as UNSAT only when every rejection came from a solver
// that is complete at the bound.

#include "msortkit/combination.hpp"

namespace msk {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Sat:
      return "SAT";
    case Verdict::Unsat:
      return "UNSAT";
    case Verdict::Unknown:
      break;
  }
  return "UNKNOWN-at-bound";
}

int verdict_exit_code(Verdict v) {
  switch (v) {
    case Verdict::Sat:
      return 0;
    case Verdict::Unsat:
      return 1;
    case Verdict::Unknown:
      break;
  }
  return 2;
}

std::set<Sort> shared_sorts(const Signature& a, const Signature& b) {
  for (const auto& f : a.functions()) {
    if (b.has_symbol(f.name)) throw SignatureError("symbol '" + f.name + "' occurs in both signatures");
  }
  for (const auto& p : a.predicates()) {
    if (b.has_symbol(p.name)) throw SignatureError("symbol '" + p.name + "' occurs in both signatures");
  }
  std::set<Sort> out;
  for (const Sort& s : a.sorts()) {
    if (b.has_sort(s)) out.insert(s);
  }
  return out;
}

namespace {

void require_qf(const FormulaPtr& phi, const Signature& sig, const char* which) {
  sort_check(*phi, sig);
  if (!is_quantifier_free(*phi)) throw Error(std::string(which) + " must be quantifier-free");
}

// Variables of V that the side formula does not mention get an arbitrary
// value so the certificate records the whole arrangement.
SatWitness complete_assignment(SatWitness w, const VariableSet& V) {
  for (const Variable& v : V.variables()) w.assignment.emplace(v, 0);
  return w;
}

struct Tally {
  bool conclusive = true;
  void reject(const SolveResult& r) { conclusive = conclusive && r.conclusive; }
  Verdict verdict() const { return conclusive ? Verdict::Unsat : Verdict::Unknown; }
};

Certificate make_certificate(const VariableSet& V, const Arrangement& delta, FormulaPtr side1, FormulaPtr side2,
                             const SatWitness& w1, const SatWitness& w2) {
  Certificate c{V, delta, std::move(side1), std::move(side2), complete_assignment(w1, V), complete_assignment(w2, V),
                std::nullopt};
  return c;
}

}  // namespace

bool verify_certificate(const Certificate& c) {
  auto side_ok = [&](const SatWitness& w, const FormulaPtr& f) {
    return satisfies(w.structure, w.assignment, *f) &&
           arrangement_of_interpretation(w.structure, w.assignment, c.shared_vars) == c.arrangement;
  };
  return side_ok(c.witness1, c.side1) && side_ok(c.witness2, c.side2);
}

CombineResult polite_combine(const TheorySolver& T1, const TheorySolver& T2, const FormulaPtr& phi1,
                             const FormulaPtr& phi2, std::size_t bound) {
  if (!T1.wit) throw Error("polite combination needs a witness function for the first theory");
  const std::set<Sort> shared = shared_sorts(*T1.theory.signature, *T2.theory.signature);
  require_qf(phi1, *T1.theory.signature, "phi1");
  require_qf(phi2, *T2.theory.signature, "phi2");
  const FormulaPtr psi1 = T1.wit(phi1);

  VariableSet V = free_vars(*psi1, shared);
  V.insert(free_vars(*phi2, shared));

  CombineResult result;
  Tally tally;
  for_each_arrangement(V, [&](const Arrangement& delta) {
    ++result.arrangements_tried;
    const FormulaPtr d = arrangement_formula(delta);
    const FormulaPtr side1 = conjunction({psi1, d});
    const SolveResult r1 = T1.solve(side1, bound);
    if (!r1.witness) {
      tally.reject(r1);
      return true;
    }
    const FormulaPtr side2 = conjunction({phi2, d});
    const SolveResult r2 = T2.solve(side2, bound);
    if (!r2.witness) {
      tally.reject(r2);
      return true;
    }
    result.certificate = make_certificate(V, delta, side1, side2, *r1.witness, *r2.witness);
    return false;
  });
  if (result.certificate) {
    if (!verify_certificate(*result.certificate)) throw Error("combination certificate failed re-verification");
    result.verdict = Verdict::Sat;
  } else {
    result.verdict = tally.verdict();
  }
  return result;
}

CombineResult shiny_combine(const TheorySolver& T1, const TheorySolver& T2, const FormulaPtr& phi1,
                            const FormulaPtr& phi2, std::size_t bound) {
  const Signature& sig1 = *T1.theory.signature;
  const Signature& sig2 = *T2.theory.signature;
  const std::set<Sort> shared = shared_sorts(sig1, sig2);
  require_qf(phi1, sig1, "phi1");
  require_qf(phi2, sig2, "phi2");

  VariableSet V = free_vars(*phi1, shared);
  V.insert(free_vars(*phi2, shared));
  // κ is indexed by the shared sorts in the first signature's order.
  std::vector<Sort> kappa_sorts;
  for (const Sort& s : sig1.sorts()) {
    if (shared.count(s)) kappa_sorts.push_back(s);
  }

  CombineResult result;
  Tally tally;
  for_each_arrangement(V, [&](const Arrangement& delta) {
    ++result.arrangements_tried;
    const FormulaPtr d = arrangement_formula(delta);
    const FormulaPtr side1 = conjunction({phi1, d});
    const FormulaPtr side2 = conjunction({phi2, d});
    const std::vector<SizeTuple> mins = minmods(T1, shared, side1, bound);
    if (mins.empty()) {
      SolveResult none;
      none.conclusive = T1.complete_for(*side1, SizeBounds::uniform(sig1.sort_count(), bound));
      tally.reject(none);
      return true;
    }
    for (const SizeTuple& kappa : mins) {
      SizeBounds b2 = SizeBounds::uniform(sig2.sort_count(), bound);
      SizeBounds b1 = SizeBounds::uniform(sig1.sort_count(), bound);
      for (std::size_t i = 0; i < kappa_sorts.size(); ++i) {
        b2.lo[sig2.sort_index(kappa_sorts[i])] = kappa[i];
        const std::size_t s1 = sig1.sort_index(kappa_sorts[i]);
        b1.lo[s1] = b1.hi[s1] = kappa[i];
      }
      const SolveResult r2 = T2.solve(side2, b2);
      if (!r2.witness) {
        tally.reject(r2);
        continue;
      }
      const SolveResult r1 = T1.solve(side1, b1);
      if (!r1.witness) throw Error("minmods entry has no model");
      result.certificate = make_certificate(V, delta, side1, side2, *r1.witness, *r2.witness);
      result.certificate->kappa = kappa;
      return false;
    }
    return true;
  });
  if (result.certificate) {
    if (!verify_certificate(*result.certificate)) throw Error("combination certificate failed re-verification");
    result.verdict = Verdict::Sat;
  } else {
    result.verdict = tally.verdict();
  }
  return result;
}

CombineResult oracle_combine(const TheorySolver& T1, const TheorySolver& T2, const FormulaPtr& phi1,
                             const FormulaPtr& phi2, std::size_t bound) {
  shared_sorts(*T1.theory.signature, *T2.theory.signature);
  require_qf(phi1, *T1.theory.signature, "phi1");
  require_qf(phi2, *T2.theory.signature, "phi2");
  TheorySolver U;
  U.theory.signature =
      std::make_shared<const Signature>(Signature::merge(*T1.theory.signature, *T2.theory.signature));
  U.theory.axioms = T1.theory.axioms;
  U.theory.axioms.insert(U.theory.axioms.end(), T2.theory.axioms.begin(), T2.theory.axioms.end());
  U.enumeration = T1.enumeration;
  if (T1.size_cap && T2.size_cap) U.size_cap = std::min(T1.size_cap, T2.size_cap);
  else U.size_cap = std::max(T1.size_cap, T2.size_cap);

  CombineResult result;
  const SolveResult r = U.solve(conjunction({phi1, phi2}), bound);
  if (r.witness) {
    result.verdict = Verdict::Sat;
    result.union_witness = r.witness;
  } else {
    result.verdict = r.conclusive ? Verdict::Unsat : Verdict::Unknown;
  }
  return result;
}

}  // namespace msk
