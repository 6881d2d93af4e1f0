#include <gtest/gtest.h>

#include <cstdlib>
#include <random>
#include <set>

#include "support.hpp"

namespace {

using srk::ConstMatrix;
using srk::Partition;
using srk::Poly;
using srk::PolyMatrix;
using srk::Rational;
using srk::VarId;

Poly x(std::uint32_t i) { return Poly::var(VarId{i}); }

Partition partition_from_mask(std::uint32_t mask, std::size_t universe) {
  std::vector<VarId> a, b;
  for (std::uint32_t i = 0; i < universe; ++i) ((mask >> i) & 1u ? a : b).push_back(VarId{i});
  return Partition(a, b);
}

ConstMatrix constant_matrix(std::vector<std::vector<Rational>> rows) {
  ConstMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

TEST(Partitions, Counts) {
  EXPECT_EQ(srk::enumerate_balanced_partitions(4).size(), 3u);
  EXPECT_EQ(srk::enumerate_balanced_partitions(6).size(), 10u);
  EXPECT_EQ(srk::enumerate_balanced_partitions(8).size(), 35u);
  EXPECT_EQ(srk::enumerate_balanced_partitions(12).size(), 462u);
}

TEST(Partitions, DistinctBalancedAndCovering) {
  const auto parts = srk::enumerate_balanced_partitions(8);
  std::set<std::vector<std::uint32_t>> seen;
  for (const auto& p : parts) {
    ASSERT_EQ(p.a().size(), 4u);
    ASSERT_EQ(p.b().size(), 4u);
    ASSERT_EQ(p.a().front(), VarId{0});
    std::vector<std::uint32_t> key;
    for (auto v : p.a()) key.push_back(v.index);
    EXPECT_TRUE(seen.insert(key).second);
    for (std::uint32_t v = 0; v < 8; ++v) EXPECT_TRUE(p.contains(VarId{v}));
  }
}

TEST(Partitions, Errors) {
  EXPECT_THROW(srk::enumerate_balanced_partitions(5), srk::OddUniverse);
  EXPECT_THROW(srk::enumerate_balanced_partitions(0), srk::OddUniverse);
  EXPECT_THROW(srk::enumerate_balanced_partitions(14), srk::CapExceeded);
  EXPECT_NO_THROW(srk::enumerate_balanced_partitions(14, 14));
  EXPECT_THROW(Partition({VarId{0}, VarId{1}}, {VarId{2}}), srk::InvalidShape);
}

TEST(Partitions, EnvironmentCap) {
  ::setenv("SRK_PARTITION_CAP", "4", 1);
  EXPECT_THROW(srk::enumerate_balanced_partitions(6), srk::CapExceeded);
  ::unsetenv("SRK_PARTITION_CAP");
  EXPECT_EQ(srk::enumerate_balanced_partitions(6).size(), 10u);
}

TEST(Matricize, IdentityExample) {
  // A = {0, 1}, B = {2, 3}; p = x0 x2 + x1 x3.
  const Partition part({VarId{0}, VarId{1}}, {VarId{2}, VarId{3}});
  const auto mat = srk::matricize(x(0) * x(2) + x(1) * x(3), part);
  EXPECT_EQ(mat.matrix, constant_matrix({{1, 0}, {0, 1}}));
}

TEST(Matricize, AntidiagonalExample) {
  const Partition part({VarId{0}}, {VarId{1}});
  const Poly p = (x(0) + x(1)) * (x(0) + x(1));
  const auto mat = srk::matricize(p, part);
  EXPECT_EQ(mat.matrix, constant_matrix({{0, 0, 1}, {0, 2, 0}, {1, 0, 0}}));
  ASSERT_EQ(mat.row_index.size(), 3u);
  EXPECT_TRUE(mat.row_index[0].is_one());
  EXPECT_EQ(mat.row_index[2], srk::Monomial::var(VarId{0}, 2));
  EXPECT_EQ(srk::exact_rank(mat.matrix), 3u);
}

TEST(Matricize, ZeroIsEmpty) {
  const auto mat = srk::matricize(Poly{}, Partition({VarId{0}}, {VarId{1}}));
  EXPECT_EQ(mat.matrix.size(), 0u);
  EXPECT_EQ(srk::sep_rank_entry(Poly{}, Partition({VarId{0}}, {VarId{1}})), 0u);
}

TEST(Matricize, UnknownVariable) {
  EXPECT_THROW(srk::matricize(x(5), Partition({VarId{0}}, {VarId{1}})), srk::UnknownVariable);
}

TEST(Matricize, EveryCoefficientOnce) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const Poly p = srk::testing::random_poly(rng, 6, 4);
    const auto mat = srk::matricize(p, partition_from_mask(0b010101, 6));
    std::size_t nonzero = 0;
    for (std::size_t r = 0; r < mat.matrix.rows(); ++r) {
      for (std::size_t c = 0; c < mat.matrix.cols(); ++c) {
        if (mat.matrix(r, c) == 0) continue;
        ++nonzero;
        const auto it = p.terms().find(mat.row_index[r] * mat.col_index[c]);
        ASSERT_NE(it, p.terms().end());
        EXPECT_EQ(it->second, mat.matrix(r, c));
      }
    }
    EXPECT_EQ(nonzero, p.size());
  }
}

TEST(ExactRank, Examples) {
  EXPECT_EQ(srk::exact_rank(constant_matrix({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})), 3u);
  EXPECT_EQ(srk::exact_rank(constant_matrix({{1, 2}, {2, 4}})), 1u);
  EXPECT_EQ(srk::exact_rank(constant_matrix({{0, 0, 1}, {0, 2, 0}, {1, 0, 0}})), 3u);
  EXPECT_EQ(srk::exact_rank(constant_matrix({{Rational(1, 3), Rational(1, 2)}, {Rational(2, 3), 1}})), 1u);
  EXPECT_EQ(srk::exact_rank(ConstMatrix(0, 0)), 0u);
}

TEST(ExactRank, MatchesGaussianOracle) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 300; ++t) {
    const std::size_t rows = 1 + rng() % 7;
    const std::size_t cols = 1 + rng() % 7;
    ConstMatrix m(rows, cols);
    // Low-rank structure from a product of thin random factors plus sparsity.
    const std::size_t inner = 1 + rng() % 4;
    const ConstMatrix l = srk::testing::random_const_matrix(rng, rows, inner);
    const ConstMatrix r = srk::testing::random_const_matrix(rng, inner, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t k = 0; k < inner; ++k) m(i, j) += l(i, k) * r(k, j);
        if (rng() % 5 == 0) m(i, j) = 0;
      }
    }
    ASSERT_EQ(srk::exact_rank(m), srk::testing::gauss_rank(srk::testing::to_rows(m)));
  }
}

TEST(SepRankEntry, Examples) {
  const Partition part({VarId{0}, VarId{1}}, {VarId{2}, VarId{3}});
  EXPECT_EQ(srk::sep_rank_entry(x(0) * x(2), part), 1u);
  EXPECT_EQ(srk::sep_rank_entry(x(0) * x(2) + x(1) * x(3), part), 2u);
  EXPECT_EQ(srk::sep_rank_entry((x(0) + x(2)) * (x(0) + x(2)), part), 3u);
  EXPECT_EQ(srk::sep_rank_entry(Poly::constant(5), part), 1u);
}

TEST(SepRankEntry, MatchesOracleOnRandomPolys) {
  std::mt19937_64 rng(1234);
  const auto masks = srk::testing::partition_masks(6);
  for (int t = 0; t < 150; ++t) {
    const Poly p = srk::testing::random_poly(rng, 6, 4, 8);
    for (auto mask : masks) {
      ASSERT_EQ(srk::sep_rank_entry(p, partition_from_mask(mask, 6)), srk::testing::oracle_rank(p, mask, 6));
    }
  }
}

TEST(SepProfile, IdentityInput) {
  const auto prof = srk::sep_profile(srk::symbols(2, 2));
  EXPECT_EQ(prof.sup_sep, 1u);
  EXPECT_EQ(prof.inf_sep, 1u);
}

TEST(SepProfile, CrossTermExample) {
  // x0 x2 + x1 x3 splits as a(A) + b(B) or a(A) b(B) + c(A) d(B) on every
  // balanced partition of 4 variables, so all three ranks are 2.
  PolyMatrix f(1, 1);
  f(0, 0) = x(0) * x(2) + x(1) * x(3);
  std::multiset<std::size_t> ranks;
  for (const auto& p : srk::enumerate_balanced_partitions(4)) ranks.insert(srk::sep_rank_entry(f(0, 0), p));
  EXPECT_EQ(ranks, (std::multiset<std::size_t>{2, 2, 2}));
  const auto reference = srk::testing::oracle_ranks(f(0, 0), 4);
  EXPECT_EQ(std::multiset<std::size_t>(reference.begin(), reference.end()), ranks);
  const auto prof = srk::sep_profile(f, 4);
  EXPECT_EQ(prof.sup_sep, 2u);
  EXPECT_EQ(prof.inf_sep, 2u);
}

TEST(SepProfile, InfModes) {
  // (x0 + x2)(x1 + x3) has rank 1 on {0,2}|{1,3} and rank 4 elsewhere.
  PolyMatrix f(1, 1);
  f(0, 0) = (x(0) + x(2)) * (x(1) + x(3));
  std::multiset<std::size_t> ranks;
  for (const auto& p : srk::enumerate_balanced_partitions(4)) ranks.insert(srk::sep_rank_entry(f(0, 0), p));
  EXPECT_EQ(ranks, (std::multiset<std::size_t>{1, 4, 4}));
  const auto reference = srk::testing::oracle_ranks(f(0, 0), 4);
  EXPECT_EQ(std::multiset<std::size_t>(reference.begin(), reference.end()), ranks);
  EXPECT_EQ(srk::sep_profile(f, 4).sup_sep, 4u);
  EXPECT_EQ(srk::sep_profile(f, 4).inf_sep, 1u);
  srk::OracleConfig cfg;
  cfg.inf_mode = srk::InfSepMode::MinOfMax;
  EXPECT_EQ(srk::sep_profile(f, 4, cfg).inf_sep, 4u);
}

TEST(SepProfile, ZeroMatrix) {
  const auto prof = srk::sep_profile(PolyMatrix(2, 2));
  EXPECT_EQ(prof.sup_sep, 0u);
  EXPECT_EQ(prof.inf_sep, 0u);
}

TEST(SepProfile, InfNeverExceedsSup) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 30; ++t) {
    const PolyMatrix f = srk::testing::random_poly_matrix(rng, 2, 2, 4, 3);
    for (auto mode : {srk::InfSepMode::MinOfMin, srk::InfSepMode::MinOfMax}) {
      srk::OracleConfig cfg;
      cfg.inf_mode = mode;
      const auto prof = srk::sep_profile(f, 4, cfg);
      EXPECT_LE(prof.inf_sep, prof.sup_sep);
    }
  }
}

TEST(SepProfile, Json) {
  PolyMatrix f(1, 1);
  f(0, 0) = (x(0) + x(2)) * (x(1) + x(3));
  const auto j = srk::to_json(srk::sep_profile(f, 4));
  EXPECT_EQ(j["sup_sep"], 4);
  EXPECT_EQ(j["inf_sep"], 1);
  EXPECT_EQ(j["entries"][0][0]["min"], 1);
  EXPECT_EQ(j["entries"][0][0]["max"], 4);
}

}  // namespace
