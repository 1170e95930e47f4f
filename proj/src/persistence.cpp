// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include "ivmod/persistence.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <string>

#include "ivmod/errors.hpp"

namespace ivmod {

void TrackerConfig::validate() const {
  if (m < 1 || m > n) throw ArgumentError("tracker: require 1 <= m <= n");
  if (vicinity_px < 0) throw ArgumentError("tracker: vicinity must be non-negative");
}

namespace {

// Summed-area table of a binary grid for O(1) rectangle queries.
class IntegralImage {
 public:
  IntegralImage(const std::vector<std::uint8_t>& grid, int width, int height)
      : width_(width), height_(height),
        sums_(static_cast<std::size_t>(width + 1) * (height + 1), 0) {
    for (int r = 0; r < height; ++r) {
      int row_sum = 0;
      for (int c = 0; c < width; ++c) {
        row_sum += grid[static_cast<std::size_t>(r) * width + c];
        at(r + 1, c + 1) = at(r, c + 1) + row_sum;
      }
    }
  }

  // Sum over rows [r0, r1] and cols [c0, c1], inclusive and clamped.
  [[nodiscard]] int sum(int r0, int r1, int c0, int c1) const {
    r0 = std::max(r0, 0);
    c0 = std::max(c0, 0);
    r1 = std::min(r1, height_ - 1);
    c1 = std::min(c1, width_ - 1);
    if (r0 > r1 || c0 > c1) return 0;
    return get(r1 + 1, c1 + 1) - get(r0, c1 + 1) - get(r1 + 1, c0) + get(r0, c0);
  }

 private:
  int& at(int r, int c) { return sums_[static_cast<std::size_t>(r) * (width_ + 1) + c]; }
  [[nodiscard]] int get(int r, int c) const {
    return sums_[static_cast<std::size_t>(r) * (width_ + 1) + c];
  }

  int width_;
  int height_;
  std::vector<int> sums_;
};

}  // namespace

PersistenceVerdict track(std::span<const OccupancyMask> blobs, const TrackerConfig& cfg) {
  cfg.validate();
  if (blobs.size() < static_cast<std::size_t>(cfg.n)) {
    throw ArgumentError("track: sequence has " + std::to_string(blobs.size()) +
                        " frames, need at least " + std::to_string(cfg.n));
  }
  const int width = blobs.front().width();
  const int height = blobs.front().height();
  for (const auto& mask : blobs) {
    if (mask.width() != width || mask.height() != height) {
      throw ArgumentError("track: frame dimensions differ");
    }
  }

  const std::size_t pixels = static_cast<std::size_t>(width) * height;
  std::vector<int> counts(pixels, 0);
  std::vector<std::uint8_t> strong(pixels, 0);

  PersistenceVerdict verdict;
  verdict.first_tracked_frame = static_cast<std::size_t>(cfg.n - 1);
  verdict.persistent.reserve(blobs.size());

  for (std::size_t t = 0; t < blobs.size(); ++t) {
    const auto now = blobs[t].data();
    for (std::size_t p = 0; p < pixels; ++p) counts[p] += now[p];
    if (t >= static_cast<std::size_t>(cfg.n)) {
      const auto expired = blobs[t - cfg.n].data();
      for (std::size_t p = 0; p < pixels; ++p) counts[p] -= expired[p];
    }

    OccupancyMask out(width, height);
    if (t >= verdict.first_tracked_frame) {
      for (std::size_t p = 0; p < pixels; ++p) strong[p] = counts[p] >= cfg.m ? 1 : 0;
      const IntegralImage strong_sum(strong, width, height);
      const int v = cfg.vicinity_px;
      for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
          const std::size_t p = static_cast<std::size_t>(r) * width + c;
          const bool occupied = now[p] != 0;
          bool keep = false;
          if (strong[p]) {
            keep = occupied || cfg.coasting;
          } else if (occupied) {
            keep = strong_sum.sum(r - v, r + v, c - v, c + v) > 0;
          }
          if (keep) out.set(r, c);
        }
      }
    }
    verdict.persistent.push_back(std::move(out));
  }
  return verdict;
}

std::vector<std::optional<double>> occupancy_series(const PersistenceVerdict& verdict,
                                                    const OccupancyReference& reference) {
  const std::size_t frames = verdict.persistent.size();
  if (reference.kind == BlobKind::kFalseNegative && reference.orig_detection_area.size() != frames) {
    throw ArgumentError("occupancy_series: reference frame count mismatch");
  }
  std::vector<std::optional<double>> series(frames);
  for (std::size_t t = verdict.first_tracked_frame; t < frames; ++t) {
    const std::size_t denom = reference.kind == BlobKind::kFalsePositive
                                  ? reference.image_area
                                  : reference.orig_detection_area[t];
    if (denom == 0) continue;
    series[t] = static_cast<double>(verdict.persistent[t].popcount()) / static_cast<double>(denom);
  }
  return series;
}

std::vector<std::pair<double, bool>> sdc_at_severity(
    std::span<const std::optional<double>> series, std::span<const double> levels) {
  bool any_positive = false;
  double sum = 0.0;
  std::size_t present = 0;
  for (const auto& value : series) {
    if (!value) continue;
    any_positive = any_positive || *value > 0.0;
    sum += *value;
    ++present;
  }
  const double mean = present == 0 ? 0.0 : sum / static_cast<double>(present);

  std::vector<std::pair<double, bool>> out;
  out.reserve(levels.size());
  for (double level : levels) {
    out.emplace_back(level, level <= 0.0 ? any_positive : mean > level);
  }
  return out;
}

void write_pgm(const OccupancyMask& mask, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot open " + path.string() + " for writing");
  file << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
  for (std::uint8_t bit : mask.data()) file.put(bit ? static_cast<char>(255) : '\0');
}

}  // namespace ivmod
