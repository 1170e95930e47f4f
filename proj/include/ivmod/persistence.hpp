// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pixel-wise M/N persistence tracking of fault-induced blobs over a frame
// sequence, per-frame occupancy of the persistent part and severity levels.

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ivmod/geometry.hpp"

namespace ivmod {

struct TrackerConfig {
  int m = 10;
  int n = 15;
  int vicinity_px = 50;  // Chebyshev radius
  bool coasting = true;  // FP blobs coast, FN blobs do not

  // Throws ArgumentError unless 1 <= m <= n and vicinity_px >= 0.
  void validate() const;
};

struct PersistenceVerdict {
  // One mask per input frame; frames before n-1 are empty (warm-up).
  std::vector<OccupancyMask> persistent;
  std::size_t first_tracked_frame = 0;  // n - 1
};

// At frame t >= n-1, with count(p) the number of frames among the last n in
// which p is set, pixel p is persistent when
//   (a) count(p) >= m and p is set now (or cfg.coasting is on), or
//   (b) count(p) < m, p is set now, and some pixel within vicinity_px has
//       count >= m.
// Throws ArgumentError on mismatched dimensions or fewer than n frames.
PersistenceVerdict track(std::span<const OccupancyMask> blobs, const TrackerConfig& cfg);

enum class BlobKind { kFalsePositive, kFalseNegative };

struct OccupancyReference {
  BlobKind kind = BlobKind::kFalsePositive;
  std::size_t image_area = 0;
  // Pixel count of the fault-free detections per frame; used for FN blobs.
  std::vector<std::size_t> orig_detection_area;
};

// FP: |persistent| / image_area. FN: |persistent| / orig_detection_area[t].
// Warm-up frames and zero denominators yield absent values.
std::vector<std::optional<double>> occupancy_series(const PersistenceVerdict& verdict,
                                                    const OccupancyReference& reference);

// Level 0 is true when any frame has nonzero occupancy. A level L > 0 is true
// when the mean of the present values exceeds L.
std::vector<std::pair<double, bool>> sdc_at_severity(
    std::span<const std::optional<double>> series, std::span<const double> levels);

// Binary PGM (P5), 255 for set pixels.
void write_pgm(const OccupancyMask& mask, const std::filesystem::path& path);

}  // namespace ivmod
