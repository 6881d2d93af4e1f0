#include <gtest/gtest.h>

#include <atomic>

#include "support.hpp"

namespace {

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  srk::parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, PropagatesExceptions) {
  EXPECT_THROW(srk::parallel_for(64, [](std::size_t i) {
                 if (i == 17) throw srk::ShapeMismatch("boom");
               }),
               srk::ShapeMismatch);
}

TEST(Oracle, CapsChecked) {
  EXPECT_THROW(srk::check_oracle_caps(srk::build_mixer(1, 1, 3), 12, 64), srk::OddUniverse);
  EXPECT_THROW(srk::check_oracle_caps(srk::build_mixer(1, 4, 4), 12, 64), srk::CapExceeded);
  EXPECT_THROW(srk::check_oracle_caps(srk::build_mixer(7, 2, 2), 12, 64), srk::DegreeCapExceeded);
  EXPECT_NO_THROW(srk::check_oracle_caps(srk::build_mixer(2, 2, 2), 12, 64));
}

TEST(Oracle, ReportShape) {
  const auto spec = srk::build_mixer(2, 2, 2, {1});
  const auto j = srk::run_oracle(spec, {0, 1, 2});
  EXPECT_EQ(j["seeds"].size(), 3u);
  EXPECT_EQ(j["spec_digest"], srk::spec_digest(spec));
  EXPECT_EQ(j["inf_sep_mode"], "min_of_min");
  std::size_t sup = 0;
  for (const auto& s : j["seeds"]) sup = std::max(sup, s["profile"]["sup_sep"].get<std::size_t>());
  EXPECT_EQ(j["aggregate"]["sup_sep"], sup);
  EXPECT_EQ(srk::run_oracle(spec, {0, 1, 2}).dump(), j.dump());
}

TEST(Oracle, KnownProfiles) {
  // Generic weights: a mixer p=2 with a first-layer residual reaches 9.
  const auto mixer = srk::run_oracle(srk::build_mixer(2, 2, 2, {1}), {0});
  EXPECT_EQ(mixer["aggregate"]["sup_sep"], 9);
  EXPECT_EQ(mixer["aggregate"]["inf_sep"], 3);
  const auto identity =
      srk::run_oracle(srk::arch_from_json(nlohmann::json{{"family", "mixer"}, {"p", 0}, {"n", 2}, {"m", 2}}), {0});
  EXPECT_EQ(identity["aggregate"]["sup_sep"], 1);
}

TEST(Oracle, StableAcrossSeeds) {
  // Separation ranks of generic weights agree across independent draws.
  const auto spec = srk::build_linear_transformer(1, 2, 2, 1);
  const auto j = srk::run_oracle(spec, {0, 1, 2, 3});
  for (const auto& s : j["seeds"]) EXPECT_EQ(s["profile"]["sup_sep"], j["aggregate"]["sup_sep"]);
}

TEST(Verify, SmallSweeps) {
  srk::VerifyConfig cfg;
  cfg.trials = 12;
  cfg.p_max = 2;
  const auto mixer = srk::run_verify(cfg);
  EXPECT_EQ(mixer.records.size(), 12u);
  EXPECT_EQ(mixer.failures, 0u);
  cfg.family = srk::Family::LinearTransformer;
  cfg.p_max = 1;
  cfg.heads_max = 2;
  const auto tf = srk::run_verify(cfg);
  EXPECT_EQ(tf.failures, 0u);
  for (const auto& r : tf.records) EXPECT_LE(r.spec.heads(), 2u);
}

TEST(Verify, Deterministic) {
  srk::VerifyConfig cfg;
  cfg.trials = 5;
  cfg.seed = 42;
  EXPECT_EQ(srk::to_json(srk::run_verify(cfg)).dump(), srk::to_json(srk::run_verify(cfg)).dump());
}

TEST(Verify, InvalidRanges) {
  srk::VerifyConfig cfg;
  cfg.trials = 1;
  cfg.p_min = 3;
  cfg.p_max = 2;
  EXPECT_THROW(srk::run_verify(cfg), srk::PreconditionViolation);
  srk::VerifyConfig odd;
  odd.trials = 1;
  odd.n_min = odd.n_max = 1;
  odd.m_min = odd.m_max = 3;
  EXPECT_THROW(srk::run_verify(odd), srk::PreconditionViolation);
}

TEST(Verify, Comparisons) {
  EXPECT_TRUE(srk::oracle_le(9, srk::Bound::of(1314, "b")));
  EXPECT_FALSE(srk::oracle_le(1315, srk::Bound::of(1314, "b")));
  EXPECT_TRUE(srk::bound_le(srk::Bound::of(1314, "a"), srk::Bound::of(1048576, "b")));
  EXPECT_TRUE(srk::bound_le(srk::Bound::log_only(5.0, "a"), srk::Bound::log_only(5.0, "b")));
  EXPECT_FALSE(srk::bound_le(srk::Bound::log_only(5.1, "a"), srk::Bound::log_only(5.0, "b")));
}

}  // namespace
