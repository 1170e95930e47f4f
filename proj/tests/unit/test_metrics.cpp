// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "ivmod/errors.hpp"
#include "ivmod/metrics.hpp"
#include "oracles.hpp"

namespace {

using namespace ivmod;

ImageEval eval(Counts orig, Counts corr, bool inf = false, bool nan = false) {
  ImageEval e;
  e.orig = orig;
  e.corr = corr;
  e.inf_flag = inf;
  e.nan_flag = nan;
  return e;
}

TEST(ClassifyImage, Examples) {
  EXPECT_EQ(classify_image(eval({3, 0, 0}, {3, 0, 0})), Verdict::kBenign);
  EXPECT_EQ(classify_image(eval({3, 0, 0}, {3, 2, 0})), Verdict::kSdc);
  EXPECT_EQ(classify_image(eval({3, 0, 0}, {3, 2, 0}, true)), Verdict::kDue);
  EXPECT_EQ(classify_image(eval({3, 0, 0}, {3, 0, 0}, false, true)), Verdict::kDue);
  EXPECT_EQ(classify_image(eval({3, 0, 0}, {2, 0, 1})), Verdict::kSdc);
}

TEST(Rates, Examples) {
  std::vector<ImageEval> evals(10, eval({1, 0, 0}, {1, 0, 0}));
  EXPECT_EQ(rates(evals).sdc, 0.0);
  evals[0].corr.fp = 1;
  evals[1].corr.fn = 1;
  evals[2].nan_flag = true;
  const auto r = rates(evals);
  EXPECT_EQ(r.sdc, 0.2);
  EXPECT_EQ(r.due, 0.1);
  for (auto& e : evals) e.nan_flag = true;
  EXPECT_EQ(rates(evals).due, 1.0);
  EXPECT_EQ(rates(evals).sdc, 0.0);
  EXPECT_THROW(rates(std::vector<ImageEval>{}), ArgumentError);
}

TEST(Severity, CountDeltas) {
  const ImageDims dims{100, 100};
  const auto r = severity(eval({10, 2, 0}, {4, 5, 6}), {}, {}, {}, dims);
  EXPECT_EQ(r.delta_fp, 3);
  ASSERT_TRUE(r.delta_fn_n);
  EXPECT_DOUBLE_EQ(*r.delta_fn_n, 0.6);
  EXPECT_FALSE(r.negative);
}

TEST(Severity, UndefinedWhenNoOriginalTp) {
  const auto r = severity(eval({0, 1, 2}, {0, 3, 2}), {}, {}, {}, ImageDims{10, 10});
  EXPECT_FALSE(r.delta_fn_n.has_value());
  EXPECT_FALSE(r.a_fn_vac.has_value());
}

TEST(Severity, NegativeChangesFlagged) {
  const auto r = severity(eval({2, 3, 1}, {3, 1, 0}), {}, {}, {}, ImageDims{10, 10});
  EXPECT_EQ(r.delta_fp, -2);
  EXPECT_DOUBLE_EQ(*r.delta_fn_n, -0.5);
  EXPECT_TRUE(r.negative);
}

TEST(Severity, DisjointFpOccupancy) {
  const std::vector<Detection> orig = {{Box{0, 0, 10, 10}, 0, 0.9}};
  std::vector<Detection> corr = orig;
  corr.push_back({Box{50, 50, 70, 70}, 1, 0.5});
  const auto r = severity(eval({1, 0, 0}, {1, 1, 0}), orig, corr, {}, ImageDims{100, 100});
  const double expect = static_cast<double>(oracle::pixel_count({Box{50, 50, 70, 70}}, 100, 100)) / 1e4;
  EXPECT_NEAR(r.a_fp_occ, expect, 1e-12);
  EXPECT_NEAR(r.a_fp_occ, 0.04, 1e-12);
  EXPECT_NEAR(*r.a_fn_vac, 0.0, 1e-12);
  EXPECT_NEAR(*r.avg_conf_orig, 0.9, 1e-12);
  EXPECT_NEAR(*r.avg_conf_corr, 0.7, 1e-12);
  EXPECT_NEAR(*r.avg_size_orig, 100.0, 1e-12);
  EXPECT_NEAR(*r.avg_size_corr, 250.0, 1e-12);
}

TEST(Severity, VacancyFraction) {
  const std::vector<Detection> orig = {{Box{0, 0, 20, 20}, 0, 1.0}};
  const std::vector<Detection> corr = {{Box{0, 0, 20, 10}, 0, 1.0}};
  const auto r = severity(eval({1, 0, 0}, {0, 1, 1}), orig, corr, {}, ImageDims{50, 50});
  EXPECT_NEAR(*r.a_fn_vac, 0.5, 1e-12);
  EXPECT_EQ(r.a_fp_occ, 0.0);
}

TEST(Severity, ConfidenceScalingOnlyMovesConfidenceFields) {
  std::vector<Detection> orig = {{Box{0, 0, 20, 20}, 0, 0.8}};
  std::vector<Detection> corr = {{Box{5, 5, 30, 30}, 0, 0.6}};
  const auto a = severity(eval({1, 0, 0}, {0, 1, 1}), orig, corr, {}, ImageDims{50, 50});
  for (auto* list : {&orig, &corr}) {
    for (auto& d : *list) d.confidence *= 0.5;
  }
  const auto b = severity(eval({1, 0, 0}, {0, 1, 1}), orig, corr, {}, ImageDims{50, 50});
  EXPECT_EQ(a.a_fp_occ, b.a_fp_occ);
  EXPECT_EQ(a.a_fn_vac, b.a_fn_vac);
  EXPECT_EQ(a.avg_size_corr, b.avg_size_corr);
  EXPECT_NEAR(*b.avg_conf_corr, 0.5 * *a.avg_conf_corr, 1e-15);
}

TEST(Severity, ZeroAreaImageThrows) {
  EXPECT_THROW(severity(ImageEval{}, {}, {}, {}, ImageDims{0, 10}), ArgumentError);
}

TEST(BitAveraged, GroupsSdcByBit) {
  auto report = [](long long dfp, Verdict v) {
    SdcReport r;
    r.verdict = v;
    r.delta_fp = dfp;
    r.delta_fn_n = 0.5;
    return r;
  };
  FaultDescriptor f30;
  f30.bit.index = 30;
  FaultDescriptor f5;
  f5.bit.index = 5;
  const std::vector<std::pair<FaultDescriptor, SdcReport>> reports = {
      {f30, report(10, Verdict::kSdc)}, {f30, report(20, Verdict::kSdc)},
      {f30, report(99, Verdict::kDue)}, {f5, report(7, Verdict::kBenign)}};
  const auto avg = bit_averaged(reports);
  EXPECT_EQ(*avg[30].mean_delta_fp, 15.0);
  EXPECT_EQ(avg[30].sdc_events, 2u);
  EXPECT_FALSE(avg[5].mean_delta_fp.has_value());
}

TEST(BaselineOccupancy, Examples) {
  const std::vector<Detection> gts = {{Box{0, 0, 20, 20}, 0, 1.0}};
  const auto same = baseline_occupancy(gts, gts, ImageDims{100, 100});
  EXPECT_EQ(same.a_fp_occ_orig, 0.0);
  EXPECT_EQ(*same.a_fn_vac_orig, 0.0);

  std::vector<Detection> extra = gts;
  extra.push_back({Box{50, 50, 60, 60}, 0, 1.0});
  EXPECT_NEAR(baseline_occupancy(extra, gts, ImageDims{100, 100}).a_fp_occ_orig, 0.01, 1e-12);

  const std::vector<Detection> dets = {{Box{0, 0, 20, 20}, 0, 1.0}};
  const std::vector<Detection> bigger = {{Box{0, 0, 20, 20}, 0, 1.0}, {Box{30, 30, 40, 40}, 0, 1.0}};
  EXPECT_NEAR(*baseline_occupancy(dets, bigger, ImageDims{100, 100}).a_fn_vac_orig, 0.25, 1e-12);
  EXPECT_FALSE(baseline_occupancy({}, gts, ImageDims{100, 100}).a_fn_vac_orig.has_value());
}

TEST(SummarizeSdc, AveragesOnlySdcEvents) {
  SdcReport a;
  a.verdict = Verdict::kSdc;
  a.delta_fp = 2;
  a.avg_size_orig = 1000.0;
  SdcReport b = a;
  b.delta_fp = 4;
  b.delta_fn_n = 1.0;
  SdcReport c;
  c.verdict = Verdict::kBenign;
  c.delta_fp = 100;
  const std::vector<SdcReport> reports = {a, b, c};
  const auto s = summarize_sdc(reports);
  EXPECT_EQ(s.sdc_events, 2u);
  EXPECT_EQ(*s.delta_fp, 3.0);
  EXPECT_EQ(*s.delta_fn_n, 1.0);
  EXPECT_EQ(*s.avg_size_orig, 1000.0);
}

}  // namespace
