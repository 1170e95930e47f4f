// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference computations written independently of the library, used as
// oracles by unit and acceptance tests. Deliberately naive.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "ivmod/geometry.hpp"
#include "ivmod/ap_eval.hpp"

namespace oracle {

// Decodes a binary32 pattern field by field.
inline double decode_f32(std::uint32_t u) {
  const int sign = static_cast<int>(u / 2147483648u);
  const int exponent = static_cast<int>((u / 8388608u) % 256u);
  const std::uint32_t mantissa = u % 8388608u;
  const double s = sign ? -1.0 : 1.0;
  if (exponent == 255) {
    return mantissa == 0 ? s * std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::quiet_NaN();
  }
  if (exponent == 0) return s * std::ldexp(static_cast<double>(mantissa), -149);
  return s * std::ldexp(1.0 + static_cast<double>(mantissa) / 8388608.0, exponent - 127);
}

enum class Kind { kRegular, kInf, kNaN };

inline Kind kind_of(std::uint32_t u) {
  const double v = decode_f32(u);
  if (std::isnan(v)) return Kind::kNaN;
  if (std::isinf(v)) return Kind::kInf;
  return Kind::kRegular;
}

// Bit manipulation by integer arithmetic rather than masks.
inline std::uint32_t with_bit(std::uint32_t u, int bit, int mode /*0 flip, 1 sa0, 2 sa1*/) {
  const std::uint64_t weight = std::uint64_t{1} << bit;
  const bool set = (u / weight) % 2 == 1;
  switch (mode) {
    case 0: return static_cast<std::uint32_t>(set ? u - weight : u + weight);
    case 1: return static_cast<std::uint32_t>(set ? u - weight : u);
    default: return static_cast<std::uint32_t>(set ? u : u + weight);
  }
}

// IoU by counting cells of a grid with `step` resolution; exact for boxes
// whose coordinates are multiples of step.
inline double grid_iou(const ivmod::Box& a, const ivmod::Box& b, double step = 0.5) {
  const double x0 = std::min(a.x1, b.x1), x1 = std::max(a.x2, b.x2);
  const double y0 = std::min(a.y1, b.y1), y1 = std::max(a.y2, b.y2);
  long inter = 0, uni = 0;
  for (double y = y0 + step / 2; y < y1; y += step) {
    for (double x = x0 + step / 2; x < x1; x += step) {
      const bool in_a = x > a.x1 && x < a.x2 && y > a.y1 && y < a.y2;
      const bool in_b = x > b.x1 && x < b.x2 && y > b.y1 && y < b.y2;
      inter += (in_a && in_b) ? 1 : 0;
      uni += (in_a || in_b) ? 1 : 0;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline double analytic_iou(const ivmod::Box& a, const ivmod::Box& b) {
  const double w = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double h = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double area_a = std::max(0.0, a.x2 - a.x1) * std::max(0.0, a.y2 - a.y1);
  const double area_b = std::max(0.0, b.x2 - b.x1) * std::max(0.0, b.y2 - b.y1);
  const double u = area_a + area_b - w * h;
  return u > 0 ? w * h / u : 0.0;
}

// Counts pixels whose unit cell overlaps some box with positive area.
inline std::size_t pixel_count(const std::vector<ivmod::Box>& boxes, int width, int height) {
  std::size_t count = 0;
  for (int i = 0; i < height; ++i) {
    for (int j = 0; j < width; ++j) {
      for (const auto& b : boxes) {
        const double ox = std::min<double>(b.x2, j + 1) - std::max<double>(b.x1, j);
        const double oy = std::min<double>(b.y2, i + 1) - std::max<double>(b.y1, i);
        if (ox > 0 && oy > 0) {
          ++count;
          break;
        }
      }
    }
  }
  return count;
}

struct BruteAssignment {
  double objective = 0.0;  // matched (1 - IoU) plus sentinel per unmatched slot
  std::size_t matches = 0;
};

// Exhaustive search over all permutations of the padded square problem.
inline BruteAssignment brute_force_assign(const std::vector<ivmod::Detection>& preds,
                                          const std::vector<ivmod::Detection>& gts,
                                          double threshold) {
  const std::size_t n = std::max(preds.size(), gts.size());
  const double sentinel = static_cast<double>(preds.size()) + 1.0;
  auto cost = [&](std::size_t i, std::size_t j) {
    if (i >= preds.size() || j >= gts.size()) return sentinel;
    if (preds[i].category != gts[j].category) return sentinel;
    const double v = analytic_iou(preds[i].box, gts[j].box);
    return v >= threshold ? 1.0 - v : sentinel;
  };
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  BruteAssignment best{std::numeric_limits<double>::infinity(), 0};
  do {
    double total = 0.0;
    std::size_t matches = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = cost(i, perm[i]);
      total += c;
      matches += c < sentinel ? 1 : 0;
    }
    if (total < best.objective) best = {total, matches};
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (n == 0) best.objective = 0.0;
  return best;
}

// Area under the interpolated PR curve, accumulated one ground truth at a
// time: every hit adds 1/n_gt times the best precision at or after it.
inline double step_integrated_ap(std::vector<ivmod::ScoredOutcome> outcomes, std::size_t n_gt) {
  if (n_gt == 0) return 0.0;
  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const auto& a, const auto& b) { return a.confidence > b.confidence; });
  std::vector<double> precision(outcomes.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    tp += outcomes[k].true_positive ? 1 : 0;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  double area = 0.0;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (!outcomes[k].true_positive) continue;
    const double best = *std::max_element(precision.begin() + static_cast<long>(k), precision.end());
    area += best / static_cast<double>(n_gt);
  }
  return area;
}

// 101-point version by brute-force scans.
inline double sampled_ap(std::vector<ivmod::ScoredOutcome> outcomes, std::size_t n_gt) {
  if (n_gt == 0) return 0.0;
  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const auto& a, const auto& b) { return a.confidence > b.confidence; });
  std::vector<double> recall(outcomes.size()), precision(outcomes.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    tp += outcomes[k].true_positive ? 1 : 0;
    recall[k] = static_cast<double>(tp) / static_cast<double>(n_gt);
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  double sum = 0.0;
  for (int s = 0; s <= 100; ++s) {
    double best = 0.0;
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
      if (recall[k] >= s / 100.0) best = std::max(best, precision[k]);
    }
    sum += best;
  }
  return sum / 101.0;
}

// Frame-by-frame M/N evaluation with explicit loops over the window.
inline std::vector<ivmod::OccupancyMask> naive_track(const std::vector<ivmod::OccupancyMask>& frames,
                                                     int m, int n, int vicinity, bool coasting) {
  const int w = frames.front().width();
  const int h = frames.front().height();
  std::vector<ivmod::OccupancyMask> out;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    ivmod::OccupancyMask mask(w, h);
    if (t + 1 >= static_cast<std::size_t>(n)) {
      auto count = [&](int r, int c) {
        int k = 0;
        for (std::size_t s = t + 1 - n; s <= t; ++s) k += frames[s].test(r, c) ? 1 : 0;
        return k;
      };
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          const bool now = frames[t].test(r, c);
          const int k = count(r, c);
          bool keep = false;
          if (k >= m) {
            keep = now || coasting;
          } else if (now) {
            for (int rr = std::max(0, r - vicinity); rr <= std::min(h - 1, r + vicinity) && !keep; ++rr) {
              for (int cc = std::max(0, c - vicinity); cc <= std::min(w - 1, c + vicinity) && !keep; ++cc) {
                keep = count(rr, cc) >= m;
              }
            }
          }
          if (keep) mask.set(r, c);
        }
      }
    }
    out.push_back(std::move(mask));
  }
  return out;
}

}  // namespace oracle
