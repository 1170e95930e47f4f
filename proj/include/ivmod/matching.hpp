// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0
//
// Confidence-independent one-to-one matching of predictions to ground truth.
// Costs are 1 - IoU for admissible pairs and a sentinel otherwise; the
// sentinel exceeds any sum of admissible costs, so the optimum first
// maximizes the number of admissible matches and then their total IoU.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ivmod/geometry.hpp"
#include "ivmod/hungarian.hpp"

namespace ivmod {

enum class CategoryMode { kStrict, kClusters, kNone };

class CategoryPolicy {
 public:
  static CategoryPolicy strict() { return CategoryPolicy(CategoryMode::kStrict, {}); }
  static CategoryPolicy none() { return CategoryPolicy(CategoryMode::kNone, {}); }
  // Each inner list is one compatibility group. Categories missing from every
  // group are compatible only with themselves. Throws ArgumentError when a
  // category is listed twice.
  static CategoryPolicy clusters(std::vector<std::vector<int>> groups);

  [[nodiscard]] CategoryMode mode() const { return mode_; }
  [[nodiscard]] const std::vector<std::vector<int>>& groups() const { return groups_; }
  [[nodiscard]] bool compatible(int a, int b) const;

 private:
  CategoryPolicy(CategoryMode mode, std::vector<std::vector<int>> groups)
      : mode_(mode), groups_(std::move(groups)) {}
  [[nodiscard]] int group_of(int category) const;

  CategoryMode mode_;
  std::vector<std::vector<int>> groups_;
};

inline constexpr double kDefaultIouThreshold = 0.5;

struct MatchPair {
  std::size_t pred = 0;
  std::size_t gt = 0;
  double iou = 0.0;

  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

struct MatchOutcome {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<MatchPair> pairs;  // sorted by prediction index

  friend bool operator==(const MatchOutcome&, const MatchOutcome&) = default;
};

// Sentinel used for inadmissible pairs and padding: |preds| + 1.
double sentinel_cost(std::size_t n_preds);

// Square matrix of side max(|preds|, |gts|), sentinel-padded.
CostMatrix build_cost_matrix(std::span<const Detection> preds, std::span<const Detection> gts,
                             double iou_threshold, const CategoryPolicy& policy);

MatchOutcome assign(std::span<const Detection> preds, std::span<const Detection> gts,
                    double iou_threshold = kDefaultIouThreshold,
                    const CategoryPolicy& policy = CategoryPolicy::strict());

// Sum of 1 - IoU over accepted pairs.
double total_cost(const MatchOutcome& outcome);

struct FpBreakdown {
  std::size_t class_only = 0;
  std::size_t box_only = 0;
  std::size_t both_or_unmatched = 0;

  [[nodiscard]] std::size_t total() const { return class_only + box_only + both_or_unmatched; }
  friend bool operator==(const FpBreakdown&, const FpBreakdown&) = default;
};

// Splits the strict-policy FPs: those rescued when categories are ignored are
// class_only; of the rest, those matchable to a same-category object with any
// positive overlap are box_only; everything else is both_or_unmatched.
FpBreakdown fp_type_breakdown(std::span<const Detection> preds, std::span<const Detection> gts,
                              double iou_threshold = kDefaultIouThreshold);

}  // namespace ivmod
