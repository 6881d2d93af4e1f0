#include <gtest/gtest.h>

#include "lemma_suite.hpp"

namespace {

TEST(LemmaSuite, NoViolationsOnRandomInstances) {
  const auto tallies = srk::testing::run_lemma_suite(100, 20240611);
  ASSERT_EQ(tallies.size(), 7u);
  for (const auto& [rule, t] : tallies) {
    EXPECT_GE(t.instances, 100u) << rule;
    EXPECT_EQ(t.violations, 0u) << rule;
  }
}

TEST(LemmaSuite, BoundsAreAttainedSomewhere) {
  // The sum and product rules are tight on separable building blocks, so the
  // oracle must reach them exactly for some partition.
  using srk::Poly;
  using srk::VarId;
  auto x = [](std::uint32_t i) { return Poly::var(VarId{i}); };
  const Poly f = x(0) * x(3) + x(1) * x(4);  // rank 2 on {0,1,2}|{3,4,5}
  const Poly g = x(2) * x(5);                // rank 1
  const std::uint32_t mask = 0b000111;
  EXPECT_EQ(srk::testing::oracle_rank(f, mask, 6), 2u);
  EXPECT_EQ(srk::testing::oracle_rank(f + g, mask, 6), 3u);
  EXPECT_EQ(srk::testing::oracle_rank(f * f, mask, 6), 3u);  // C(3, 2)
}

TEST(ElementaryRules, Values) {
  using srk::Bound;
  using srk::Rule;
  const Bound k3 = Bound::of(3, "k");
  const Bound k5 = Bound::of(5, "k");
  const Bound two[] = {k3, k5};
  const Bound one[] = {k5};
  EXPECT_EQ(*srk::elementary_rule_bound(Rule::Add, two).exact, 8);
  EXPECT_EQ(*srk::elementary_rule_bound(Rule::ScalarMul, two).exact, 15);
  EXPECT_EQ(*srk::elementary_rule_bound(Rule::MatMul, two, 4).exact, 60);
  EXPECT_EQ(*srk::elementary_rule_bound(Rule::LinearMap, one, 4).exact, 20);
  EXPECT_EQ(*srk::elementary_rule_bound(Rule::HadamardSquare, one).exact, 15);
  EXPECT_EQ(*srk::elementary_rule_bound(Rule::Permute, one).exact, 5);
  EXPECT_EQ(*srk::elementary_rule_bound(Rule::Transpose, one).exact, 5);
  EXPECT_EQ(*srk::elementary_rule_bound(Rule::Identity, {}).exact, 2);
}

TEST(ElementaryRules, ParseAndArity) {
  EXPECT_EQ(srk::parse_rule("hadamard_square"), srk::Rule::HadamardSquare);
  EXPECT_THROW(srk::parse_rule("convolve"), srk::UnknownRule);
  const srk::Bound one[] = {srk::Bound::of(2, "k")};
  EXPECT_THROW(srk::elementary_rule_bound(srk::Rule::Add, one), srk::PreconditionViolation);
}

TEST(ElementaryRules, ProvenanceRecorded) {
  const srk::Bound one[] = {srk::Bound::of(2, "leaf")};
  const auto b = srk::elementary_rule_bound(srk::Rule::HadamardSquare, one);
  ASSERT_EQ(b.provenance.size(), 2u);
  EXPECT_EQ(b.provenance.front(), "leaf");
  EXPECT_EQ(b.provenance.back(), "hadamard_square");
}

}  // namespace
