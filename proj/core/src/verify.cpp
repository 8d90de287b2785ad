#include "msortkit/transforms.hpp"

namespace msk {

std::optional<SatWitness> find_inequivalence(const FormulaPtr& a, const FormulaPtr& b, const SignaturePtr& sig,
                                             std::size_t max_size, const EnumerationOptions& options) {
  VariableSet vars = free_vars(*a);
  vars.insert(free_vars(*b));
  const std::vector<Variable> order = vars.variables();
  const CompiledFormula ca(*a, *sig, order);
  const CompiledFormula cb(*b, *sig, order);
  const TheoryDef all{sig, {}, std::nullopt};
  std::optional<SatWitness> found;
  for (const auto& sizes : size_profiles(SizeBounds::uniform(sig->sort_count(), max_size))) {
    for_each_model(
        all, sizes,
        [&](const Structure& A) {
          for_each_assignment(A, order, [&](const Assignment& nu) {
            if (ca.eval(A, nu) != cb.eval(A, nu)) found = SatWitness{A, nu};
            return !found;
          });
          return !found;
        },
        options);
    if (found) break;
  }
  return found;
}

std::optional<SizeTuple> find_skolem_mismatch(const FormulaPtr& phi, const SignaturePtr& sig, const Skolemized& sk,
                                              std::size_t max_size, const EnumerationOptions& options) {
  const TheoryDef plain{sig, {}, std::nullopt};
  const TheoryDef extended{std::make_shared<const Signature>(sk.signature), {}, std::nullopt};
  for (const auto& sizes : size_profiles(SizeBounds::uniform(sig->sort_count(), max_size))) {
    const bool before = check_sat(plain, *phi, SizeBounds::exactly(sizes), options).has_value();
    const bool after = check_sat(extended, *sk.sentence, SizeBounds::exactly(sizes), options).has_value();
    if (before != after) return sizes;
  }
  return std::nullopt;
}

}  // namespace msk
