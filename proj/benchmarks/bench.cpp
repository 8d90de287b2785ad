#include <benchmark/benchmark.h>

#include "msortkit/arrangements.hpp"
#include "msortkit/combination.hpp"
#include "msortkit/ramsey.hpp"
#include "msortkit/semantics.hpp"
#include "msortkit/transforms.hpp"

using namespace msk;

static void BM_PigeonholeSearch(benchmark::State& state) {
  const auto ground = static_cast<GroundElement>(state.range(0));
  auto f = Coloring::random_subsets(1, 100, ground, 7);
  for (auto _ : state) benchmark::DoNotOptimize(ramsey_search(f, 10));
}
BENCHMARK(BM_PigeonholeSearch)->Arg(901)->Arg(10'000);

static void BM_RamseyBruteForce(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ramsey_number_bruteforce(2, 2, 3));
}
BENCHMARK(BM_RamseyBruteForce);

static void BM_DirectedSearch(benchmark::State& state) {
  auto f = Coloring::random_tuples(2, 2, 1'000'000, 3);
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(directed_ramsey_search(f, m));
}
BENCHMARK(BM_DirectedSearch)->Arg(2)->Arg(3);

static void BM_Arrangements(benchmark::State& state) {
  VariableSet V;
  for (int i = 0; i < state.range(0); ++i) V.insert(Variable{"v" + std::to_string(i), Sort{"S"}});
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_arrangements(V));
}
BENCHMARK(BM_Arrangements)->DenseRange(4, 8, 2);

static void BM_BijectionModels(benchmark::State& state) {
  const TheoryDef T = theory_from_document(parse_document(
      "(sort S1)(sort S2)(declare-fun f (S1) S2)"
      "(assert (forall ((x S1)(y S1)) (=> (= (f x) (f y)) (= x y))))"
      "(assert (forall ((z S2)) (exists ((x S1)) (= (f x) z))))"));
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_models(T, SizeTuple{n, n}));
}
BENCHMARK(BM_BijectionModels)->DenseRange(3, 5);

static void BM_PoliteCombine(benchmark::State& state) {
  const Sort S{"S"};
  const Signature sig = parse_signature("(sort S)");
  VariableScope scope;
  for (const char* v : {"x", "y", "z", "u"}) scope.emplace(v, S);
  auto phi1 = parse_formula("(or (= x y) (not (= y z)))", sig, scope);
  auto phi2 = parse_formula("(and (not (= y u)) (not (= z u)))", sig, scope);
  const TheorySolver T1 = empty_theory_solver({S}, {S});
  const TheorySolver T2 = exact_cardinality_solver(S, 2);
  for (auto _ : state) benchmark::DoNotOptimize(polite_combine(T1, T2, phi1, phi2, 5));
}
BENCHMARK(BM_PoliteCombine);

static void BM_Gdnf(benchmark::State& state) {
  const Document doc = parse_document(
      "(sort A)(sort B)(split ((A) (B)))(declare-pred P (A))(declare-pred Q (B))"
      "(declare-var x A)(declare-var y B)");
  const SplitContext ctx(doc.signature);
  auto phi = parse_formula(
      "(forall ((a A)) (exists ((b B)) (or (and (P a) (Q b)) (and (P x) (not (Q y))) (and (not (P a)) (Q y)))))",
      doc.signature, doc.variables);
  for (auto _ : state) benchmark::DoNotOptimize(to_gdnf(phi, ctx));
}
BENCHMARK(BM_Gdnf);

BENCHMARK_MAIN();
