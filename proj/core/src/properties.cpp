#include <algorithm>
#include <map>

#include "msortkit/combination.hpp"

namespace msk {

SizeTuple project_sizes(const Signature& sig, const std::set<Sort>& S, const SizeTuple& sizes) {
  SizeTuple out;
  for (std::size_t s = 0; s < sig.sort_count(); ++s) {
    if (S.count(sig.sorts()[s])) out.push_back(sizes[s]);
  }
  return out;
}

bool dominates(const SizeTuple& a, const SizeTuple& b) {
  if (a.size() != b.size()) throw Error("size tuples of different lengths");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (b[i] > a[i]) return false;
  }
  return true;
}

namespace {

void check_sorts(const Signature& sig, const std::set<Sort>& S) {
  for (const Sort& s : S) {
    if (!sig.has_sort(s)) throw SortError("sort '" + s.name + "' is not in the theory's signature");
  }
}

std::size_t effective_bound(const TheorySolver& T, std::size_t bound) {
  return T.size_cap ? std::min(bound, T.size_cap) : bound;
}

// Profiles up to the bound at which φ has a model.
std::vector<SizeTuple> satisfiable_profiles(const TheorySolver& T, const FormulaPtr& phi, std::size_t bound,
                                            std::uint64_t& checked) {
  std::vector<SizeTuple> out;
  const auto profiles = size_profiles(SizeBounds::uniform(T.theory.signature->sort_count(), bound));
  for (const auto& p : profiles) {
    ++checked;
    if (check_sat(T.theory, *phi, SizeBounds::exactly(p), T.enumeration)) out.push_back(p);
  }
  return out;
}

std::string tuple_text(const SizeTuple& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s + ")";
}

}  // namespace

std::vector<SizeTuple> minmods(const TheorySolver& T, const std::set<Sort>& S, const FormulaPtr& phi,
                               std::size_t bound) {
  const Signature& sig = *T.theory.signature;
  check_sorts(sig, S);
  sort_check(*phi, sig);
  std::vector<SizeTuple> found;
  for (const auto& p : size_profiles(SizeBounds::uniform(sig.sort_count(), effective_bound(T, bound)))) {
    const SizeTuple proj = project_sizes(sig, S, p);
    // A projection dominating one already found cannot be minimal.
    if (std::any_of(found.begin(), found.end(), [&](const SizeTuple& f) { return dominates(proj, f); })) continue;
    if (check_sat(T.theory, *phi, SizeBounds::exactly(p), T.enumeration)) found.push_back(proj);
  }
  std::vector<SizeTuple> out;
  for (const auto& a : found) {
    const bool minimal = std::none_of(found.begin(), found.end(),
                                      [&](const SizeTuple& b) { return b != a && dominates(a, b); });
    if (minimal) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PropertyReport check_stably_finite_at(const TheorySolver& T, const std::set<Sort>& S, const FormulaPtr& phi,
                                      std::size_t bound) {
  const Signature& sig = *T.theory.signature;
  check_sorts(sig, S);
  bound = effective_bound(T, bound);
  PropertyReport report;
  for (const auto& p : satisfiable_profiles(T, phi, bound, report.profiles_checked)) {
    SizeBounds target = SizeBounds::uniform(sig.sort_count(), bound);
    bool possible = true;
    for (std::size_t s = 0; s < sig.sort_count(); ++s) {
      if (!S.count(sig.sorts()[s])) continue;
      target.hi[s] = p[s] == bound ? p[s] - 1 : p[s];
      if (target.hi[s] == 0) possible = false;
    }
    if (possible && check_sat(T.theory, *phi, target, T.enumeration)) continue;
    PropertyViolation v{p, project_sizes(sig, S, target.hi), {}};
    v.message = "model at " + tuple_text(p) + " has no finite shrink with S-sizes at most " + tuple_text(v.target);
    report.violations.push_back(std::move(v));
  }
  return report;
}

PropertyReport check_finitely_smooth_at(const TheorySolver& T, const std::set<Sort>& S, const FormulaPtr& phi,
                                        std::size_t bound) {
  const Signature& sig = *T.theory.signature;
  check_sorts(sig, S);
  bound = effective_bound(T, bound);
  std::vector<std::size_t> s_index;
  for (std::size_t s = 0; s < sig.sort_count(); ++s) {
    if (S.count(sig.sorts()[s])) s_index.push_back(s);
  }
  PropertyReport report;
  std::map<SizeTuple, bool> realizable;
  auto realize = [&](const SizeTuple& kappa) {
    auto it = realizable.find(kappa);
    if (it != realizable.end()) return it->second;
    SizeBounds b = SizeBounds::uniform(sig.sort_count(), bound);
    for (std::size_t i = 0; i < s_index.size(); ++i) b.lo[s_index[i]] = b.hi[s_index[i]] = kappa[i];
    const bool ok = check_sat(T.theory, *phi, b, T.enumeration).has_value();
    realizable.emplace(kappa, ok);
    return ok;
  };
  for (const auto& p : satisfiable_profiles(T, phi, bound, report.profiles_checked)) {
    const SizeTuple base = project_sizes(sig, S, p);
    SizeTuple kappa = base;
    for (;;) {
      if (!realize(kappa)) {
        PropertyViolation v{p, kappa, {}};
        v.message = "model at " + tuple_text(p) + " cannot be padded to S-sizes " + tuple_text(kappa);
        report.violations.push_back(std::move(v));
      }
      std::size_t i = kappa.size();
      bool done = true;
      while (i > 0) {
        --i;
        if (kappa[i] < bound) {
          ++kappa[i];
          done = false;
          break;
        }
        kappa[i] = base[i];
      }
      if (done) break;
    }
  }
  return report;
}

}  // namespace msk
