#include <doctest.h>

#include "msortkit/combination.hpp"
#include "msortkit/transforms.hpp"

using namespace msk;

namespace {

const Sort S{"S"};

TheorySolver empty_solver() { return empty_theory_solver({S}, {S}); }

FormulaPtr qf(const std::string& text) {
  static const Signature sig = parse_signature("(sort S)");
  VariableScope scope;
  for (const char* v : {"x", "y", "z", "u", "v", "w"}) scope.emplace(v, S);
  return parse_formula(text, sig, scope);
}

bool antichain(const std::vector<SizeTuple>& xs) {
  for (const auto& a : xs) {
    for (const auto& b : xs) {
      if (a != b && dominates(a, b)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("fixture solvers") {
  TheorySolver two = exact_cardinality_solver(S, 2);
  CHECK(two.solve(top(), 4).witness->structure.size(0) == 2);
  CHECK_FALSE(two.solve(qf("(and (not (= x y)) (not (= x z)) (not (= y z)))"), 4).witness);
  CHECK(two.solve(qf("(and (not (= x y)) (not (= x z)) (not (= y z)))"), 4).conclusive);
  // A bound below the variable count cannot settle the question.
  TheorySolver empty = empty_solver();
  auto r = empty.solve(qf("(and (not (= x y)) (not (= x z)) (not (= y z)))"), 2);
  CHECK_FALSE(r.witness);
  CHECK_FALSE(r.conclusive);
  CHECK(empty.complete_for(*qf("(= x y)"), SizeBounds::uniform(1, 1)));
  CHECK_FALSE(empty.complete_for(*qf("(not (= x y))"), SizeBounds::uniform(1, 1)));
}

TEST_CASE("empty-theory witness function") {
  const Signature sig = parse_signature("(sort S)");
  auto out = wit_empty_theory(qf("(= x y)"), {S}, sig);
  CHECK(to_string(*out) == "(and (= x y) (= w_S w_S))");
  CHECK(free_vars(*out).size() == 3);
  CHECK(same(wit_empty_theory(top(), {}, sig), top()));
  // A formula that already mentions w_S gets a fresh name.
  auto again = wit_empty_theory(qf("(= w x)"), {S}, parse_signature("(sort S)"));
  CHECK(free_vars(*again).size() == 3);
  CHECK_THROWS_AS(wit_empty_theory(top(), {S}, parse_signature("(sort S)(declare-pred P (S))")), SignatureError);

  TheorySolver T = empty_solver();
  for (const char* text : {"(= x y)", "(not (= x y))", "(or (= x y) (not (= y z)))", "true", "false"}) {
    auto report = check_witness_function(T, qf(text), 4);
    INFO(text);
    CHECK(report.ok());
    CHECK(report.assignments_checked > 0);
  }
  // Arrangements over {x, y, w_S}, then over one more fresh variable.
  CHECK(check_witness_function(T, qf("(= x y)"), 3, 0).arrangements_checked == 5);
  CHECK(check_witness_function(T, qf("(= x y)"), 3, 1).arrangements_checked == 5 + 15);
  // Dropping the extra conjunct keeps equivalence but breaks shrinking
  // whenever a shared sort has no variables.
  TheorySolver bad = T;
  bad.wit = [](const FormulaPtr& phi) { return phi; };
  CHECK_FALSE(check_witness_function(bad, top(), 3).ok());
}

TEST_CASE("polite combination") {
  TheorySolver T1 = empty_solver();
  SUBCASE("distinct pairs on both sides") {
    auto r = polite_combine(T1, exact_cardinality_solver(S, 2), qf("(not (= x y))"), qf("(not (= u v))"), 4);
    CHECK(r.verdict == Verdict::Sat);
    REQUIRE(r.certificate);
    const auto& c = *r.certificate;
    CHECK_FALSE(c.arrangement.same_block(Variable{"x", S}, Variable{"y", S}));
    CHECK_FALSE(c.arrangement.same_block(Variable{"u", S}, Variable{"v", S}));
    CHECK(verify_certificate(c));
    CHECK(c.witness2.structure.size(0) == 2);
  }
  SUBCASE("one element cannot hold two distinct values") {
    auto r = polite_combine(T1, exact_cardinality_solver(S, 1), qf("(not (= x y))"), top(), 4);
    CHECK(r.verdict == Verdict::Unsat);
    CHECK_FALSE(r.certificate);
  }
  SUBCASE("trivial") {
    auto r = polite_combine(T1, exact_cardinality_solver(S, 3), top(), top(), 3);
    CHECK(r.verdict == Verdict::Sat);
    CHECK(r.arrangements_tried == 1);
  }
  SUBCASE("requires a witness function") {
    TheorySolver none = exact_cardinality_solver(S, 2);
    CHECK_THROWS(polite_combine(none, T1, top(), top(), 3));
  }
  SUBCASE("shared symbols are rejected") {
    TheorySolver P;
    P.theory.signature = std::make_shared<const Signature>(parse_signature("(sort S)(declare-pred P (S))"));
    CHECK_THROWS_AS(shiny_combine(P, P, top(), top(), 2), SignatureError);
  }
  SUBCASE("quantified inputs are rejected") {
    CHECK_THROWS(polite_combine(T1, T1, qf("(exists ((q S)) (= q x))"), top(), 2));
  }
}

TEST_CASE("shiny combination") {
  TheorySolver T1 = empty_solver();
  SUBCASE("same verdict as polite") {
    auto r = shiny_combine(T1, exact_cardinality_solver(S, 2), qf("(not (= x y))"), qf("(not (= u v))"), 4);
    CHECK(r.verdict == Verdict::Sat);
    REQUIRE(r.certificate);
    CHECK(r.certificate->kappa == SizeTuple{2});
    CHECK(verify_certificate(*r.certificate));
  }
  SUBCASE("three distinct values need three elements") {
    auto r = shiny_combine(T1, exact_cardinality_solver(S, 2),
                           qf("(and (not (= x y)) (not (= x z)) (not (= y z)))"), top(), 4);
    CHECK(r.verdict == Verdict::Unsat);
  }
  SUBCASE("trivial") {
    auto r = shiny_combine(T1, exact_cardinality_solver(S, 1), top(), top(), 3);
    CHECK(r.verdict == Verdict::Sat);
    CHECK(r.certificate->kappa == SizeTuple{1});
  }
}

TEST_CASE("oracle and procedures agree on a small corpus") {
  const std::vector<const char*> side1{"true", "(= x y)", "(not (= x y))",
                                       "(and (not (= x y)) (not (= x z)) (not (= y z)))",
                                       "(or (= x y) (= y z))"};
  const std::vector<const char*> side2{"true", "(not (= y u))", "(and (not (= u z)) (= y u))",
                                       "(and (not (= y z)) (not (= z u)) (not (= y u)))"};
  TheorySolver T1 = empty_solver();
  std::vector<TheorySolver> T2s{empty_solver()};
  for (std::size_t n = 1; n <= 3; ++n) T2s.push_back(exact_cardinality_solver(S, n));
  for (const auto& T2 : T2s) {
    // Shared variables stay within {x, y, z, u} plus the witness variable, so
    // bound 5 is enough for every side to be conclusive.
    for (const char* a : side1) {
      for (const char* b : side2) {
        INFO(std::string(a) << " / " << b);
        auto oracle = oracle_combine(T1, T2, qf(a), qf(b), 5);
        auto polite = polite_combine(T1, T2, qf(a), qf(b), 5);
        auto shiny = shiny_combine(T1, T2, qf(a), qf(b), 5);
        CHECK(oracle.verdict != Verdict::Unknown);
        CHECK(polite.verdict == oracle.verdict);
        CHECK(shiny.verdict == oracle.verdict);
        if (polite.certificate) CHECK(verify_certificate(*polite.certificate));
        if (shiny.certificate) CHECK(verify_certificate(*shiny.certificate));
      }
    }
  }
}

TEST_CASE("verdict names") {
  CHECK(verdict_name(Verdict::Sat) == "SAT");
  CHECK(verdict_name(Verdict::Unsat) == "UNSAT");
  CHECK(verdict_name(Verdict::Unknown) == "UNKNOWN-at-bound");
  CHECK(verdict_exit_code(Verdict::Unknown) == 2);
}

TEST_CASE("minimal sizes") {
  TheorySolver T = empty_solver();
  CHECK(minmods(T, {S}, qf("(= x x)"), 4) == std::vector<SizeTuple>{{1}});
  CHECK(minmods(T, {S}, qf("(not (= x y))"), 4) == std::vector<SizeTuple>{{2}});
  CHECK(minmods(T, {S}, qf("(and (not (= x y)) (not (= x z)) (not (= y z)))"), 4) == std::vector<SizeTuple>{{3}});
  CHECK(minmods(T, {S}, qf("(not (= x x))"), 4).empty());

  TheorySolver bij;
  bij.theory = theory_from_document(parse_document(
      "(sort S1)(sort S2)(declare-fun f (S1) S2)"
      "(assert (forall ((x S1)(y S1)) (=> (= (f x) (f y)) (= x y))))"
      "(assert (forall ((z S2)) (exists ((x S1)) (= (f x) z))))"));
  CHECK(minmods(bij, {Sort{"S1"}, Sort{"S2"}}, top(), 3) == std::vector<SizeTuple>{{1, 1}});
  CHECK(minmods(bij, {Sort{"S2"}}, top(), 3) == std::vector<SizeTuple>{{1}});

  // Two incomparable minima: P holds somewhere in A, or B has two elements.
  TheorySolver two;
  two.theory = theory_from_document(parse_document(
      "(sort A)(sort B)(declare-pred P (A))"
      "(assert (or (exists ((a A)(b A)) (not (= a b))) (exists ((c B)(d B)) (not (= c d)))))"));
  auto mins = minmods(two, {Sort{"A"}, Sort{"B"}}, top(), 3);
  CHECK(mins == std::vector<SizeTuple>{{1, 2}, {2, 1}});
  CHECK(antichain(mins));
  for (const auto& p : size_profiles(SizeBounds::uniform(2, 3))) {
    if (!check_sat(two.theory, *top(), SizeBounds::exactly(p))) continue;
    CHECK(std::any_of(mins.begin(), mins.end(), [&](const SizeTuple& m) { return dominates(p, m); }));
  }
}

TEST_CASE("stable finiteness checker") {
  CHECK(check_stably_finite_at(empty_solver(), {S}, qf("(not (= x y))"), 4).ok());
  for (std::size_t n = 1; n <= 3; ++n) CHECK(check_stably_finite_at(exact_cardinality_solver(S, n), {S}, top(), 4).ok());
  // Sizes 1 and >= 3 only: the size-4 model at the bound shrinks to 3.
  TheorySolver gap;
  gap.theory.signature = std::make_shared<const Signature>(parse_signature("(sort S)"));
  gap.theory.axioms = {implies(at_least_formula(S, 2), at_least_formula(S, 3))};
  CHECK(check_stably_finite_at(gap, {S}, top(), 4).ok());
  // Exactly 4 elements at bound 4 counts as unbounded and cannot shrink.
  auto report = check_stably_finite_at(exact_cardinality_solver(S, 4), {S}, top(), 4);
  CHECK_FALSE(report.ok());
}

TEST_CASE("finite smoothness checker") {
  CHECK(check_finitely_smooth_at(empty_solver(), {S}, top(), 4).ok());
  CHECK(check_finitely_smooth_at(empty_solver(), {S}, qf("(not (= x y))"), 4).ok());
  auto report = check_finitely_smooth_at(exact_cardinality_solver(S, 2), {S}, top(), 4);
  CHECK_FALSE(report.ok());
  REQUIRE(!report.violations.empty());
  CHECK(report.violations.front().model_sizes == SizeTuple{2});
  CHECK(report.violations.front().target == SizeTuple{3});
  CHECK(report.violations.front().message == "model at (2) cannot be padded to S-sizes (3)");
  for (const auto& v : report.violations) CHECK(v.target != v.model_sizes);
}

TEST_CASE("gamma fragments") {
  auto sig = std::make_shared<const Signature>(parse_signature("(sort S1)(sort S2)(declare-fun f (S2) S1)"));
  GammaSetup setup;
  setup.signature = sig;
  setup.ell = 0;
  setup.constants = {3, 2};
  setup.term_depth = 1;
  SUBCASE("the pigeonhole instance") {
    auto frags = gamma_fragments(setup, top());
    CHECK(frags.gamma1.size() == 3 + 1);
    REQUIRE(frags.gamma2.size() == 1);
    CHECK(to_string(*frags.gamma2[0]) == "(= (f c2_0) (f c2_1))");
    CHECK(frags.gamma3.empty());
    CHECK(gamma_size_plan(setup, frags) == SizeTuple{3, 3 * 1 + 1});
    TheorySolver base;
    base.theory.signature = sig;
    auto model = construct_gamma_fragment_model(setup, top(), frags, base);
    CHECK(model.sizes[1] >= 4);
    for (const auto& f : frags.all()) CHECK(satisfies(model.structure, model.assignment, *f));
    for (const auto& cs : model.constants) {
      for (std::size_t i = 1; i < cs.size(); ++i) CHECK(cs[i - 1] < cs[i]);
    }
  }
  SUBCASE("full-size parameters") {
    setup.constants = {100, 10};
    auto frags = gamma_fragments(setup, top());
    CHECK(frags.gamma2.size() == 10 * 9 / 2);
    CHECK(gamma_size_plan(setup, frags) == SizeTuple{100, 901});
  }
  SUBCASE("one constant per sort") {
    setup.constants = {1, 1};
    auto frags = gamma_fragments(setup, top());
    CHECK(frags.gamma1.empty());
    CHECK(frags.gamma2.empty());
  }
  SUBCASE("covering disjunction") {
    setup.ell = 1;
    setup.constants = {2, 1};
    auto frags = gamma_fragments(setup, top());
    REQUIRE(frags.gamma3.size() == 1);
    CHECK(to_string(*frags.gamma3[0]) == "(forall ((x S1)) (or (= x c1_0) (= x c1_1)))");
  }
  SUBCASE("no function symbols") {
    GammaSetup bare;
    bare.signature = std::make_shared<const Signature>(parse_signature("(sort E)"));
    bare.constants = {3};
    auto frags = gamma_fragments(bare, top());
    CHECK(frags.gamma2.empty());
    TheorySolver base;
    base.theory.signature = bare.signature;
    auto model = construct_gamma_fragment_model(bare, top(), frags, base);
    CHECK(model.sizes[0] >= 3);
    for (const auto& f : frags.all()) CHECK(satisfies(model.structure, model.assignment, *f));
  }
  SUBCASE("invalid setups") {
    setup.constants = {3};
    CHECK_THROWS(gamma_fragments(setup, top()));
    setup.constants = {3, 2};
    setup.ell = 3;
    CHECK_THROWS(gamma_fragments(setup, top()));
  }
}
