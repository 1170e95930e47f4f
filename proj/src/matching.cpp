// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include "ivmod/matching.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>

#include "ivmod/errors.hpp"

namespace ivmod {

CategoryPolicy CategoryPolicy::clusters(std::vector<std::vector<int>> groups) {
  std::set<int> seen;
  for (const auto& group : groups) {
    for (int category : group) {
      if (!seen.insert(category).second) {
        throw ArgumentError("category " + std::to_string(category) +
                            " appears in more than one cluster");
      }
    }
  }
  return CategoryPolicy(CategoryMode::kClusters, std::move(groups));
}

int CategoryPolicy::group_of(int category) const {
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (std::find(groups_[g].begin(), groups_[g].end(), category) != groups_[g].end()) {
      return static_cast<int>(g);
    }
  }
  return -1;
}

bool CategoryPolicy::compatible(int a, int b) const {
  switch (mode_) {
    case CategoryMode::kNone:
      return true;
    case CategoryMode::kStrict:
      return a == b;
    case CategoryMode::kClusters: {
      if (a == b) return true;
      const int ga = group_of(a);
      return ga >= 0 && ga == group_of(b);
    }
  }
  return false;
}

double sentinel_cost(std::size_t n_preds) { return static_cast<double>(n_preds) + 1.0; }

CostMatrix build_cost_matrix(std::span<const Detection> preds, std::span<const Detection> gts,
                             double iou_threshold, const CategoryPolicy& policy) {
  const std::size_t n = std::max(preds.size(), gts.size());
  CostMatrix cost(n, n, sentinel_cost(preds.size()));
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (!policy.compatible(preds[i].category, gts[j].category)) continue;
      const double overlap = iou(preds[i].box, gts[j].box);
      if (overlap >= iou_threshold) cost(i, j) = 1.0 - overlap;
    }
  }
  return cost;
}

MatchOutcome assign(std::span<const Detection> preds, std::span<const Detection> gts,
                    double iou_threshold, const CategoryPolicy& policy) {
  MatchOutcome outcome;
  if (!preds.empty() && !gts.empty()) {
    const CostMatrix cost = build_cost_matrix(preds, gts, iou_threshold, policy);
    const double sentinel = sentinel_cost(preds.size());
    const auto columns = solve_assignment(cost);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const std::size_t j = columns[i];
      if (j >= gts.size() || cost(i, j) >= sentinel) continue;
      outcome.pairs.push_back(MatchPair{i, j, iou(preds[i].box, gts[j].box)});
    }
  }
  outcome.tp = outcome.pairs.size();
  outcome.fp = preds.size() - outcome.tp;
  outcome.fn = gts.size() - outcome.tp;
  return outcome;
}

double total_cost(const MatchOutcome& outcome) {
  double sum = 0.0;
  for (const auto& pair : outcome.pairs) sum += 1.0 - pair.iou;
  return sum;
}

namespace {

std::vector<bool> matched_preds(const MatchOutcome& outcome, std::size_t n_preds) {
  std::vector<bool> matched(n_preds, false);
  for (const auto& pair : outcome.pairs) matched[pair.pred] = true;
  return matched;
}

}  // namespace

FpBreakdown fp_type_breakdown(std::span<const Detection> preds, std::span<const Detection> gts,
                              double iou_threshold) {
  const auto strict = matched_preds(assign(preds, gts, iou_threshold, CategoryPolicy::strict()),
                                    preds.size());
  const auto relaxed = matched_preds(assign(preds, gts, iou_threshold, CategoryPolicy::none()),
                                     preds.size());
  const auto any_overlap =
      matched_preds(assign(preds, gts, std::numeric_limits<double>::min(), CategoryPolicy::strict()),
                    preds.size());

  FpBreakdown breakdown;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (strict[i]) continue;
    if (relaxed[i]) {
      ++breakdown.class_only;
    } else if (any_overlap[i]) {
      ++breakdown.box_only;
    } else {
      ++breakdown.both_or_unmatched;
    }
  }
  return breakdown;
}

}  // namespace ivmod
