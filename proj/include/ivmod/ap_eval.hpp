// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0
//
// Average precision: per-category greedy matching in confidence order,
// cumulative precision/recall and the area under the interpolated curve.
// Also the synthetic outcome sets used to probe AP's confidence sensitivity.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <variant>
#include <vector>

#include "ivmod/geometry.hpp"

namespace ivmod {

using DetectionsByImage = std::vector<std::vector<Detection>>;

enum class ApInterpolation {
  kCoco101,     // envelope sampled at recall 0.00, 0.01, ..., 1.00
  kContinuous,  // exact area under the precision envelope
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct PrCurve {
  int category = 0;
  std::size_t n_gt = 0;
  std::vector<PrPoint> points;  // one per prediction, confidence-descending
};

struct ScoredOutcome {
  double confidence = 0.0;
  bool true_positive = false;
};

// Sorts outcomes by confidence (stable, descending) and accumulates P/R.
PrCurve pr_curve(std::span<const ScoredOutcome> outcomes, std::size_t n_gt, int category = 0);

// 0 when n_gt is 0 or the curve is empty.
double area_under(const PrCurve& curve, ApInterpolation interpolation);

struct ApResult {
  std::map<int, double> per_category;  // only categories present in ground truth
  std::vector<PrCurve> curves;
  double mean = 0.0;                   // 0 when no ground truth at all
};

// Throws ArgumentError when the two image lists differ in length.
ApResult average_precision(const DetectionsByImage& preds, const DetectionsByImage& gts,
                           double iou_threshold = 0.5,
                           ApInterpolation interpolation = ApInterpolation::kCoco101);

// Mean of AP over IoU thresholds 0.50, 0.55, ..., 0.95.
double mean_average_precision(const DetectionsByImage& preds, const DetectionsByImage& gts,
                              ApInterpolation interpolation = ApInterpolation::kCoco101);

struct SyntheticSetConfig {
  std::size_t n_objects = 100;
  double p_tp = 0.7;
  double fp_rate = 0.3;
  double conf_low = 0.7;
  double conf_high = 1.0;
  std::uint64_t seed = 0;

  // Throws ArgumentError on probabilities outside [0,1] or low > high.
  void validate() const;
};

// Ground-truth objects reduced to their count; predictions to (confidence,
// outcome) pairs. No geometry is involved.
struct SyntheticSet {
  std::size_t n_gt = 0;
  std::vector<ScoredOutcome> outcomes;

  [[nodiscard]] std::size_t tp_count() const;
  [[nodiscard]] std::size_t fp_count() const;
};

// Each object is detected with probability p_tp. Every detection spawns an
// FP with probability fp_rate. All confidences are uniform on the range.
SyntheticSet generate_synthetic_set(const SyntheticSetConfig& cfg);

struct AddFps {
  std::size_t count = 0;
  double conf_low = 0.0;
  double conf_high = 1.0;
};
struct RemoveTps {
  std::size_t count = 0;
};
using Perturbation = std::variant<AddFps, RemoveTps>;

// Appends FPs or turns randomly chosen TPs into misses (dropping their
// predictions). Throws ArgumentError when removing more TPs than exist.
SyntheticSet perturb_set(const SyntheticSet& set, const Perturbation& perturbation,
                         std::uint64_t seed);

double synthetic_ap(const SyntheticSet& set,
                    ApInterpolation interpolation = ApInterpolation::kCoco101);

}  // namespace ivmod
