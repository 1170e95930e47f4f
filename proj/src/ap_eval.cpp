// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include "ivmod/ap_eval.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "ivmod/errors.hpp"

namespace ivmod {

PrCurve pr_curve(std::span<const ScoredOutcome> outcomes, std::size_t n_gt, int category) {
  std::vector<ScoredOutcome> sorted(outcomes.begin(), outcomes.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ScoredOutcome& a, const ScoredOutcome& b) {
                     return a.confidence > b.confidence;
                   });
  PrCurve curve;
  curve.category = category;
  curve.n_gt = n_gt;
  curve.points.reserve(sorted.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (sorted[k].true_positive) ++tp;
    const double recall = n_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_gt);
    const double precision = static_cast<double>(tp) / static_cast<double>(k + 1);
    curve.points.push_back(PrPoint{recall, precision});
  }
  return curve;
}

double area_under(const PrCurve& curve, ApInterpolation interpolation) {
  if (curve.n_gt == 0 || curve.points.empty()) return 0.0;
  const auto& pts = curve.points;

  // Precision envelope: running maximum from the tail.
  std::vector<double> envelope(pts.size());
  double best = 0.0;
  for (std::size_t k = pts.size(); k-- > 0;) {
    best = std::max(best, pts[k].precision);
    envelope[k] = best;
  }

  if (interpolation == ApInterpolation::kContinuous) {
    double area = 0.0;
    double prev_recall = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      area += (pts[k].recall - prev_recall) * envelope[k];
      prev_recall = pts[k].recall;
    }
    return area;
  }

  double sum = 0.0;
  std::size_t k = 0;
  for (int step = 0; step <= 100; ++step) {
    const double r = step / 100.0;
    while (k < pts.size() && pts[k].recall < r) ++k;
    if (k == pts.size()) break;
    sum += envelope[k];
  }
  return sum / 101.0;
}

namespace {

struct Candidate {
  std::size_t image;
  std::size_t index;
  double confidence;
};

}  // namespace

ApResult average_precision(const DetectionsByImage& preds, const DetectionsByImage& gts,
                           double iou_threshold, ApInterpolation interpolation) {
  if (preds.size() != gts.size()) {
    throw ArgumentError("average_precision: prediction and ground-truth image counts differ");
  }
  std::set<int> categories;
  for (const auto& image : gts) {
    for (const auto& g : image) categories.insert(g.category);
  }

  ApResult result;
  for (int category : categories) {
    std::vector<Candidate> candidates;
    std::size_t n_gt = 0;
    for (std::size_t im = 0; im < preds.size(); ++im) {
      for (std::size_t i = 0; i < preds[im].size(); ++i) {
        if (preds[im][i].category == category) {
          candidates.push_back(Candidate{im, i, preds[im][i].confidence});
        }
      }
      for (const auto& g : gts[im]) n_gt += g.category == category ? 1 : 0;
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                       return a.confidence > b.confidence;
                     });

    std::vector<std::vector<bool>> taken(gts.size());
    for (std::size_t im = 0; im < gts.size(); ++im) taken[im].assign(gts[im].size(), false);

    std::vector<ScoredOutcome> outcomes;
    outcomes.reserve(candidates.size());
    for (const auto& cand : candidates) {
      const Box& box = preds[cand.image][cand.index].box;
      const auto& image_gts = gts[cand.image];
      double best_iou = iou_threshold;
      std::size_t best = image_gts.size();
      for (std::size_t j = 0; j < image_gts.size(); ++j) {
        if (image_gts[j].category != category || taken[cand.image][j]) continue;
        const double overlap = iou(box, image_gts[j].box);
        if (overlap >= best_iou && (best == image_gts.size() || overlap > best_iou)) {
          best_iou = overlap;
          best = j;
        }
      }
      const bool hit = best < image_gts.size();
      if (hit) taken[cand.image][best] = true;
      outcomes.push_back(ScoredOutcome{cand.confidence, hit});
    }

    PrCurve curve = pr_curve(outcomes, n_gt, category);
    result.per_category[category] = area_under(curve, interpolation);
    result.curves.push_back(std::move(curve));
  }

  if (!result.per_category.empty()) {
    double sum = 0.0;
    for (const auto& [category, ap] : result.per_category) sum += ap;
    result.mean = sum / static_cast<double>(result.per_category.size());
  }
  return result;
}

double mean_average_precision(const DetectionsByImage& preds, const DetectionsByImage& gts,
                              ApInterpolation interpolation) {
  double sum = 0.0;
  for (int step = 0; step < 10; ++step) {
    sum += average_precision(preds, gts, 0.5 + 0.05 * step, interpolation).mean;
  }
  return sum / 10.0;
}

void SyntheticSetConfig::validate() const {
  auto is_fraction = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!is_fraction(p_tp) || !is_fraction(fp_rate)) {
    throw ArgumentError("synthetic set: probabilities must lie in [0, 1]");
  }
  if (!(conf_low <= conf_high)) throw ArgumentError("synthetic set: conf_low > conf_high");
}

std::size_t SyntheticSet::tp_count() const {
  return static_cast<std::size_t>(std::count_if(
      outcomes.begin(), outcomes.end(), [](const ScoredOutcome& o) { return o.true_positive; }));
}

std::size_t SyntheticSet::fp_count() const { return outcomes.size() - tp_count(); }

SyntheticSet generate_synthetic_set(const SyntheticSetConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::bernoulli_distribution detect(cfg.p_tp);
  std::bernoulli_distribution spawn_fp(cfg.fp_rate);
  std::uniform_real_distribution<double> conf(cfg.conf_low, cfg.conf_high);

  SyntheticSet set;
  set.n_gt = cfg.n_objects;
  for (std::size_t k = 0; k < cfg.n_objects; ++k) {
    if (!detect(rng)) continue;
    set.outcomes.push_back(ScoredOutcome{conf(rng), true});
    if (spawn_fp(rng)) set.outcomes.push_back(ScoredOutcome{conf(rng), false});
  }
  return set;
}

SyntheticSet perturb_set(const SyntheticSet& set, const Perturbation& perturbation,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SyntheticSet out = set;
  if (const auto* add = std::get_if<AddFps>(&perturbation)) {
    if (!(add->conf_low <= add->conf_high)) throw ArgumentError("perturb_set: conf_low > conf_high");
    std::uniform_real_distribution<double> conf(add->conf_low, add->conf_high);
    for (std::size_t k = 0; k < add->count; ++k) {
      out.outcomes.push_back(ScoredOutcome{conf(rng), false});
    }
    return out;
  }

  const auto& remove = std::get<RemoveTps>(perturbation);
  std::vector<std::size_t> tp_slots;
  for (std::size_t k = 0; k < set.outcomes.size(); ++k) {
    if (set.outcomes[k].true_positive) tp_slots.push_back(k);
  }
  if (remove.count > tp_slots.size()) {
    throw ArgumentError("perturb_set: cannot remove more TPs than the set contains");
  }
  std::shuffle(tp_slots.begin(), tp_slots.end(), rng);
  std::vector<bool> drop(set.outcomes.size(), false);
  for (std::size_t k = 0; k < remove.count; ++k) drop[tp_slots[k]] = true;
  out.outcomes.clear();
  for (std::size_t k = 0; k < set.outcomes.size(); ++k) {
    if (!drop[k]) out.outcomes.push_back(set.outcomes[k]);
  }
  return out;
}

double synthetic_ap(const SyntheticSet& set, ApInterpolation interpolation) {
  return area_under(pr_curve(set.outcomes, set.n_gt), interpolation);
}

}  // namespace ivmod
