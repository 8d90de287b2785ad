#include <doctest.h>

#include "msortkit/arrangements.hpp"
#include "msortkit/semantics.hpp"

using namespace msk;

namespace {

// Bell numbers from the Bell triangle.
std::vector<std::uint64_t> bell_triangle(std::size_t n) {
  std::vector<std::uint64_t> out{1};
  std::vector<std::uint64_t> row{1};
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (auto x : row) next.push_back(next.back() + x);
    out.push_back(next.front());
    row = next;
  }
  return out;
}

const Sort S1{"S1"}, S2{"S2"};

}  // namespace

TEST_CASE("partitions") {
  CHECK(enumerate_partitions({"x"}) == std::vector<Partition>{{{"x"}}});
  CHECK(enumerate_partitions({"x", "y"}) == std::vector<Partition>{{{"x", "y"}}, {{"x"}, {"y"}}});
  auto three = enumerate_partitions({"x", "y", "z"});
  CHECK(three.size() == 5);
  CHECK(three.front() == Partition{{"x", "y", "z"}});
  CHECK(three.back() == Partition{{"x"}, {"y"}, {"z"}});
  CHECK(enumerate_partitions({}).size() == 1);
  CHECK_THROWS_AS(enumerate_partitions(std::vector<std::string>(11, "v")), CapExceeded);

  auto rgs = restricted_growth_strings(4);
  CHECK(std::is_sorted(rgs.begin(), rgs.end()));
  for (const auto& s : rgs) {
    std::size_t top = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(s[i] <= (i == 0 ? 0 : top + 1));
      top = std::max(top, s[i]);
    }
  }
}

TEST_CASE("bell numbers") {
  const auto expected = bell_triangle(25);
  for (std::size_t n = 0; n <= 25; ++n) CHECK(bell(n) == expected[n]);
  for (std::size_t n = 0; n <= 8; ++n) {
    std::vector<std::string> items;
    for (std::size_t i = 0; i < n; ++i) items.push_back("v" + std::to_string(i));
    CHECK(enumerate_partitions(items).size() == bell(n));
  }
  CHECK_THROWS_AS(bell(40), OverflowError);
}

TEST_CASE("arrangement formulas") {
  Arrangement one;
  one.per_sort[S1] = {{"x", "y"}};
  CHECK(to_string(*arrangement_formula(one)) == "(and (= x y))");
  Arrangement two;
  two.per_sort[S1] = {{"x"}, {"y"}};
  CHECK(to_string(*arrangement_formula(two)) == "(and (not (= x y)))");
  CHECK(arrangement_formula(Arrangement{})->kind == Formula::Kind::True);

  Arrangement mixed;
  mixed.per_sort[S1] = {{"x", "y"}};
  mixed.per_sort[S2] = {{"u"}, {"v", "w"}};
  auto delta = arrangement_formula(mixed);
  CHECK(to_string(*delta) == "(and (= x y) (not (= u v)) (not (= u w)) (= v w))");

  // Satisfied exactly by the assignments inducing the same blocks.
  auto sig = std::make_shared<const Signature>(parse_signature("(sort S1)(sort S2)"));
  Structure A(sig, {3, 3});
  const std::vector<Variable> vars{{"x", S1}, {"y", S1}, {"u", S2}, {"v", S2}, {"w", S2}};
  std::size_t hits = 0;
  for_each_assignment(A, vars, [&](const Assignment& nu) {
    const bool by_hand = nu.at(vars[0]) == nu.at(vars[1]) && nu.at(vars[2]) != nu.at(vars[3]) &&
                         nu.at(vars[3]) == nu.at(vars[4]);
    CHECK(satisfies(A, nu, *delta) == by_hand);
    hits += by_hand;
    return true;
  });
  CHECK(hits == 3 * 3 * 2);
}

TEST_CASE("arrangement enumeration") {
  CHECK(enumerate_arrangements(VariableSet{{"x", S1}, {"y", S1}}).size() == 2);
  VariableSet V{{"x", S1}, {"y", S1}, {"u", S2}, {"v", S2}, {"w", S2}};
  CHECK(enumerate_arrangements(V).size() == 10);
  CHECK(count_arrangements(V) == 10);
  auto none = enumerate_arrangements(VariableSet{});
  REQUIRE(none.size() == 1);
  CHECK(arrangement_formula(none[0])->kind == Formula::Kind::True);
}

TEST_CASE("arrangement formulas partition the assignment space") {
  auto sig = std::make_shared<const Signature>(parse_signature("(sort S1)(sort S2)"));
  VariableSet V{{"x", S1}, {"y", S1}, {"z", S1}, {"u", S2}, {"v", S2}};
  const auto arrangements = enumerate_arrangements(V);
  std::vector<FormulaPtr> formulas;
  for (const auto& a : arrangements) formulas.push_back(arrangement_formula(a));
  Structure A(sig, {3, 2});
  for_each_assignment(A, V.variables(), [&](const Assignment& nu) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < formulas.size(); ++i) {
      if (satisfies(A, nu, *formulas[i])) {
        ++count;
        CHECK(arrangement_of_interpretation(A, nu, V) == arrangements[i]);
      }
    }
    CHECK(count == 1);
    return true;
  });
}

TEST_CASE("arrangement of an interpretation") {
  auto sig = std::make_shared<const Signature>(parse_signature("(sort S1)"));
  Structure A(sig, {3});
  const Variable x{"x", S1}, y{"y", S1}, z{"z", S1}, t{"t", S1};
  CHECK(arrangement_of_interpretation(A, {{x, 1}, {y, 1}}, VariableSet{x, y}).per_sort.at(S1) ==
        Partition{{"x", "y"}});
  CHECK(arrangement_of_interpretation(A, {{x, 0}, {y, 1}, {z, 2}}, VariableSet{x, y, z}).per_sort.at(S1) ==
        Partition{{"x"}, {"y"}, {"z"}});
  Assignment nu{{t, 0}, {x, 1}, {y, 0}, {z, 1}};
  auto delta = arrangement_of_interpretation(A, nu, VariableSet{t, x, y, z});
  CHECK(delta.per_sort.at(S1) == Partition{{"t", "y"}, {"x", "z"}});
  CHECK(satisfies(A, nu, *arrangement_formula(delta)));
  CHECK_THROWS_AS(arrangement_of_interpretation(A, {{x, 0}}, VariableSet{x, y}), EvalError);
  CHECK(print_arrangement(delta) == "S1: {t y} {x z}");
}
