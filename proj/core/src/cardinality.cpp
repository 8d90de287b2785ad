#include "msortkit/transforms.hpp"

namespace msk {

FormulaPtr at_least_formula(const Sort& s, std::size_t n) {
  if (n <= 1) return top();
  std::vector<Variable> vars;
  for (std::size_t i = 1; i <= n; ++i) vars.push_back(Variable{"x" + std::to_string(i), s});
  std::vector<FormulaPtr> distinct;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) distinct.push_back(negation(equal(make_var(vars[i]), make_var(vars[j]))));
  }
  FormulaPtr body = conjunction(std::move(distinct));
  for (std::size_t i = n; i-- > 0;) body = exists(vars[i], body);
  return body;
}

FormulaPtr exact_cardinality_formula(const Sort& s, std::size_t n) {
  if (n == 0) throw Error("exact cardinality requires n >= 1");
  FormulaPtr upper = negation(at_least_formula(s, n + 1));
  FormulaPtr lower = at_least_formula(s, n);
  if (lower->kind == Formula::Kind::True) return upper;
  return make_and({lower, upper});
}

}  // namespace msk
