#include <gtest/gtest.h>

#include "possev/fuzzy.hpp"

using namespace possev;

namespace {
const UniversePtr kU = Universe::make({"a", "b", "c", "d"});
FuzzySubset ramp() {
  return FuzzySubset::make(kU, {{"a", Rat(1)}, {"b", Rat(3, 4)}, {"c", Rat(1, 2)}, {"d", Rat(0)}});
}
}  // namespace

TEST(FuzzySubset, ConstructionAndAccess) {
  FuzzySubset f = ramp();
  EXPECT_EQ(f.value("b"), Rat(3, 4));
  EXPECT_EQ(f.value(3), Rat(0));
  EXPECT_THROW(FuzzySubset::make(kU, {{"z", Rat(1)}}), Error);
  try {
    FuzzySubset::make(kU, {{"a", Rat(5, 4)}});
    FAIL() << "membership above 1 accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::membership_out_of_range);
  }
}

TEST(FuzzySubset, LambdaCutsAreNestedAndThresholded) {
  FuzzySubset f = ramp();
  EXPECT_EQ(lambda_cut(f, Rat(1)).to_string(), "{a}");
  EXPECT_EQ(lambda_cut(f, Rat(3, 4)).to_string(), "{a,b}");
  EXPECT_EQ(lambda_cut(f, Rat(2, 3)).to_string(), "{a,b}");
  EXPECT_EQ(lambda_cut(f, Rat(1, 100)).to_string(), "{a,b,c}");
  EXPECT_THROW(lambda_cut(f, Rat(0)), Error);
  // nesting: lower threshold never removes points
  for (int k = 1; k <= 8; ++k)
    EXPECT_TRUE(lambda_cut(f, Rat(8, 8)).is_subset_of(lambda_cut(f, Rat(k, 8))));
}

TEST(FuzzySubset, PossibilityNecessityDuality) {
  FuzzySubset f = ramp();
  EXPECT_TRUE(is_normal(f));
  Subset c = Subset::of(kU, {"a", "b"});
  EXPECT_EQ(possibility(f, c), Rat(1));
  EXPECT_EQ(necessity(f, c), Rat(1, 2));
  EXPECT_EQ(possibility(f, c.complement()), Rat(1, 2));
  // duality: N(C) = 1 - Pi(complement C), here exactly
  EXPECT_EQ(necessity(f, c), 1 - possibility(f, c.complement()));
  EXPECT_EQ(possibility(f, Subset::empty(kU)), Rat(0));
  EXPECT_EQ(fuzzy_commonality(f, c), Rat(3, 4));
  EXPECT_THROW(fuzzy_commonality(f, Subset::empty(kU)), Error);
}

TEST(FuzzySubset, SubnormalValuesNormalizeByHeight) {
  FuzzySubset f = FuzzySubset::make(kU, {{"a", Rat(1, 2)}, {"b", Rat(1, 4)}});
  EXPECT_EQ(height(f), Rat(1, 2));
  EXPECT_FALSE(is_normal(f));
  EXPECT_EQ(possibility(f, Subset::of(kU, {"b"})), Rat(1, 2));   // (1/4)/(1/2)
  EXPECT_EQ(necessity(f, Subset::of(kU, {"a"})), Rat(1, 2));     // 1 - (1/4)/(1/2)
  FuzzySubset zero = FuzzySubset::make(kU, {});
  EXPECT_THROW(possibility(zero, Subset::full(kU)), Error);
}

TEST(FuzzySubset, ComplementAndGridFlooring) {
  FuzzySubset f = FuzzySubset::make(kU, {{"a", Rat(1)}, {"b", Rat(1, 3)}, {"c", Rat(2, 3)}});
  FuzzySubset nf = fuzzy_complement(f);
  EXPECT_EQ(nf.value("a"), Rat(0));
  EXPECT_EQ(nf.value("b"), Rat(2, 3));
  EXPECT_EQ(nf.value("d"), Rat(1));
  // flooring at depth 2: 1/3 -> 1/4, 2/3 -> 2/4
  FuzzySubset g = floor_to_grid(f, 2);
  EXPECT_EQ(g.value("a"), Rat(1));
  EXPECT_EQ(g.value("b"), Rat(1, 4));
  EXPECT_EQ(g.value("c"), Rat(1, 2));
  EXPECT_EQ(g.value("d"), Rat(0));
  // flooring what is already on the grid changes nothing
  for (std::size_t i = 0; i < kU->size(); ++i)
    EXPECT_EQ(floor_to_grid(g, 2).value(i), g.value(i));
}

TEST(PointwiseOperators, KnownValuesAndRanges) {
  const Rat a(3, 4), b(1, 2);
  EXPECT_EQ(pointwise_operator(OperatorKind::zadeh_union, a, b), Rat(3, 4));
  EXPECT_EQ(pointwise_operator(OperatorKind::zadeh_intersection, a, b), Rat(1, 2));
  EXPECT_EQ(pointwise_operator(OperatorKind::prob_sum, a, b), Rat(7, 8));
  EXPECT_EQ(pointwise_operator(OperatorKind::product, a, b), Rat(3, 8));
  EXPECT_EQ(pointwise_operator(OperatorKind::bounded_sum, a, b), Rat(1));
  EXPECT_EQ(pointwise_operator(OperatorKind::bounded_difference, a, b), Rat(1, 4));
  EXPECT_EQ(pointwise_operator(OperatorKind::lukasiewicz_impl, a, b), Rat(3, 4));
  EXPECT_EQ(pointwise_operator(OperatorKind::reichenbach_impl, a, b), Rat(5, 8));
  EXPECT_EQ(pointwise_operator(OperatorKind::kleene_dienes_impl, a, b), Rat(1, 2));
  // all operators stay inside [0,1] on a grid sweep
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 4; ++j)
      for (OperatorKind k :
           {OperatorKind::zadeh_union, OperatorKind::zadeh_intersection, OperatorKind::prob_sum,
            OperatorKind::product, OperatorKind::bounded_sum, OperatorKind::bounded_difference,
            OperatorKind::lukasiewicz_impl, OperatorKind::reichenbach_impl,
            OperatorKind::kleene_dienes_impl})
        EXPECT_TRUE(in_unit_interval(pointwise_operator(k, Rat(i, 4), Rat(j, 4))))
            << operator_name(k) << " at " << i << "/4, " << j << "/4";
}

TEST(Rational, ParsingAndGridHelpers) {
  EXPECT_EQ(parse_rat("3/4"), Rat(3, 4));
  EXPECT_EQ(parse_rat("0.3"), Rat(3, 10));
  EXPECT_EQ(parse_rat("1"), Rat(1));
  EXPECT_THROW(parse_rat("three"), Error);
  EXPECT_THROW(parse_rat("1/0"), Error);
  EXPECT_EQ(to_fraction_string(Rat(3, 4)), "3/4");
  EXPECT_EQ(to_decimal_string(Rat(1, 3), 6), "0.333333");
  EXPECT_EQ(to_decimal_string(Rat(1), 6), "1.000000");
  EXPECT_TRUE(on_grid(Rat(3, 8), 3));
  EXPECT_FALSE(on_grid(Rat(1, 3), 3));
  EXPECT_EQ(grid_floor(Rat(1, 3), 2), 1);   // 4/3 -> 1
  EXPECT_EQ(grid_floor(Rat(1), 2), 4);
  EXPECT_EQ(grid_floor(Rat(0), 2), 0);
}
