// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "ivmod/ap_eval.hpp"
#include "ivmod/errors.hpp"
#include "oracles.hpp"

namespace {

using namespace ivmod;

Detection det(double x, int cat, double conf) { return Detection{Box{x, 0, x + 10, 10}, cat, conf}; }

// Two objects; predictions TP (0.9), FP (0.8), TP (0.7).
struct Fixture {
  DetectionsByImage preds{{det(0, 0, 0.9), det(100, 0, 0.8), det(40, 0, 0.7)}};
  DetectionsByImage gts{{det(0, 0, 1.0), det(40, 0, 1.0)}};
};

TEST(AveragePrecision, HandExampleContinuous) {
  Fixture f;
  const auto ap = average_precision(f.preds, f.gts, 0.5, ApInterpolation::kContinuous);
  EXPECT_NEAR(ap.mean, 0.5 * 1.0 + 0.5 * (2.0 / 3.0), 1e-12);
  const std::vector<ScoredOutcome> outcomes = {{0.9, true}, {0.8, false}, {0.7, true}};
  EXPECT_NEAR(ap.mean, oracle::step_integrated_ap(outcomes, 2), 1e-9);
}

TEST(AveragePrecision, HandExampleCoco101) {
  Fixture f;
  const auto ap = average_precision(f.preds, f.gts, 0.5, ApInterpolation::kCoco101);
  // 51 recall samples at precision 1, 50 at 2/3.
  EXPECT_NEAR(ap.mean, (51.0 + 50.0 * 2.0 / 3.0) / 101.0, 1e-12);
  EXPECT_NEAR(ap.mean, 0.835, 1e-3);
}

TEST(AveragePrecision, PerfectAndEmpty) {
  Fixture f;
  const DetectionsByImage perfect{{det(0, 0, 0.9), det(40, 0, 0.8)}};
  EXPECT_EQ(average_precision(perfect, f.gts).mean, 1.0);
  const DetectionsByImage nothing{{}};
  EXPECT_EQ(average_precision(nothing, f.gts).mean, 0.0);
}

TEST(AveragePrecision, CategoriesAbsentFromTruthExcluded) {
  const DetectionsByImage preds{{det(0, 0, 0.9), det(50, 3, 0.9)}};
  const DetectionsByImage gts{{det(0, 0, 1.0)}};
  const auto ap = average_precision(preds, gts);
  EXPECT_EQ(ap.per_category.size(), 1u);
  EXPECT_EQ(ap.mean, 1.0);
}

TEST(AveragePrecision, GreedyMatchesEachTruthOnce) {
  const DetectionsByImage preds{{det(0, 0, 0.9), det(0, 0, 0.8)}};
  const DetectionsByImage gts{{det(0, 0, 1.0)}};
  const auto ap = average_precision(preds, gts, 0.5, ApInterpolation::kContinuous);
  ASSERT_EQ(ap.curves.size(), 1u);
  EXPECT_EQ(ap.curves[0].points[1].precision, 0.5);
  EXPECT_EQ(ap.mean, 1.0);
}

TEST(AveragePrecision, MismatchedImageCountsThrow) {
  EXPECT_THROW(average_precision(DetectionsByImage(2), DetectionsByImage(3)), ArgumentError);
}

TEST(AveragePrecision, RandomCurvesMatchOracles) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> conf(0, 1);
  std::bernoulli_distribution hit(0.6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ScoredOutcome> outcomes(static_cast<std::size_t>(rng() % 40));
    std::size_t tps = 0;
    for (auto& o : outcomes) {
      o = ScoredOutcome{conf(rng), hit(rng)};
      tps += o.true_positive ? 1 : 0;
    }
    const std::size_t n_gt = tps + rng() % 5;
    const auto curve = pr_curve(outcomes, n_gt);
    ASSERT_NEAR(area_under(curve, ApInterpolation::kContinuous),
                oracle::step_integrated_ap(outcomes, n_gt), 1e-9);
    ASSERT_NEAR(area_under(curve, ApInterpolation::kCoco101), oracle::sampled_ap(outcomes, n_gt),
                1e-12);
  }
}

TEST(MeanAveragePrecision, ThresholdSweep) {
  // IoU 9/11 ~ 0.818 passes thresholds 0.50..0.80 (7 of 10).
  const DetectionsByImage preds{{Detection{Box{1, 0, 11, 10}, 0, 0.9}}};
  const DetectionsByImage gts{{Detection{Box{0, 0, 10, 10}, 0, 1.0}}};
  EXPECT_NEAR(mean_average_precision(preds, gts), 0.7, 1e-12);
}

TEST(Synthetic, CaptionParametersCounts) {
  SyntheticSetConfig cfg;
  double tp = 0, fp = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    cfg.seed = seed;
    const auto set = generate_synthetic_set(cfg);
    EXPECT_EQ(set.n_gt, 100u);
    tp += static_cast<double>(set.tp_count());
    fp += static_cast<double>(set.fp_count());
  }
  EXPECT_NEAR(tp / 200.0, 70.0, 1.5);
  EXPECT_NEAR(fp / 200.0, 21.0, 1.5);
}

TEST(Synthetic, Extremes) {
  SyntheticSetConfig cfg;
  cfg.p_tp = 1.0;
  cfg.fp_rate = 0.0;
  EXPECT_EQ(synthetic_ap(generate_synthetic_set(cfg)), 1.0);
  cfg.p_tp = 0.0;
  EXPECT_EQ(synthetic_ap(generate_synthetic_set(cfg)), 0.0);
  cfg.p_tp = 1.5;
  EXPECT_THROW(generate_synthetic_set(cfg), ArgumentError);
}

TEST(Synthetic, DeterministicPerSeed) {
  SyntheticSetConfig cfg;
  cfg.seed = 5;
  const auto a = generate_synthetic_set(cfg);
  const auto b = generate_synthetic_set(cfg);
  ASSERT_EQ(a.outcomes.size(), b.outcomes.size());
  for (std::size_t k = 0; k < a.outcomes.size(); ++k) {
    EXPECT_EQ(a.outcomes[k].confidence, b.outcomes[k].confidence);
  }
}

TEST(Perturb, LowConfidenceFpsBarelyMatter) {
  SyntheticSetConfig cfg;
  cfg.seed = 1;
  const auto base = generate_synthetic_set(cfg);
  const auto low = perturb_set(base, AddFps{500, 0.0, 0.2}, 2);
  const auto high = perturb_set(base, AddFps{100, 0.9, 1.0}, 3);
  EXPECT_LT(std::abs(synthetic_ap(base) - synthetic_ap(low)), 0.02);
  EXPECT_GT(synthetic_ap(base) - synthetic_ap(high), 0.2);
}

TEST(Perturb, MonotoneAndValidated) {
  SyntheticSetConfig cfg;
  cfg.seed = 9;
  const auto base = generate_synthetic_set(cfg);
  EXPECT_EQ(perturb_set(base, RemoveTps{0}, 1).outcomes.size(), base.outcomes.size());
  for (std::uint64_t s = 0; s < 20; ++s) {
    EXPECT_LE(synthetic_ap(perturb_set(base, AddFps{5, 0.0, 1.0}, s)), synthetic_ap(base));
    EXPECT_LE(synthetic_ap(perturb_set(base, RemoveTps{3}, s)), synthetic_ap(base));
  }
  EXPECT_THROW(perturb_set(base, RemoveTps{base.tp_count() + 1}, 1), ArgumentError);
}

}  // namespace
