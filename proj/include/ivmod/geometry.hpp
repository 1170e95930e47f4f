// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0
//
// Axis-aligned boxes in corner-pair pixel coordinates, IoU, clipping, NMS and
// rasterization of box sets into binary occupancy masks.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ivmod {

struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  // Swaps corners so that x1 <= x2 and y1 <= y2.
  [[nodiscard]] Box normalized() const;
  [[nodiscard]] double width() const { return x2 - x1; }
  [[nodiscard]] double height() const { return y2 - y1; }
  // Zero for degenerate boxes.
  [[nodiscard]] double area() const;

  friend bool operator==(const Box&, const Box&) = default;
};

struct Detection {
  Box box;
  int category = 0;
  double confidence = 1.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct ImageDims {
  int width = 0;
  int height = 0;
  [[nodiscard]] std::size_t area() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
};

// Row-major binary pixel grid.
class OccupancyMask {
 public:
  OccupancyMask() = default;
  OccupancyMask(int width, int height);

  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] std::size_t size() const { return bits_.size(); }

  [[nodiscard]] bool test(int row, int col) const {
    return bits_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }
  void set(int row, int col, bool value = true) {
    bits_[static_cast<std::size_t>(row) * width_ + col] = value ? 1 : 0;
  }
  // Fills the inclusive-exclusive rectangle [row0,row1) x [col0,col1).
  void fill(int row0, int row1, int col0, int col1);

  [[nodiscard]] std::size_t popcount() const;
  [[nodiscard]] bool empty() const { return popcount() == 0; }
  [[nodiscard]] std::span<const std::uint8_t> data() const { return bits_; }

  friend bool operator==(const OccupancyMask&, const OccupancyMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Intersection over union of two normalized boxes; 0 when the union is empty.
double iou(const Box& a, const Box& b);

// Clamps coordinates to [0,width] x [0,height]. May return a zero-area box.
Box clip(const Box& box, double width, double height);

inline constexpr std::size_t kDefaultMaxDetections = 1000;

// Greedy per-category suppression. Survivors are returned confidence-descending
// (ties keep input order), at most `max_detections` of them. A detection is
// dropped when its IoU with a kept detection of the same category exceeds
// `iou_threshold`.
std::vector<Detection> nms(std::span<const Detection> detections, double iou_threshold,
                           std::size_t max_detections = kDefaultMaxDetections);

// Pixel (row i, col j) is set when some box overlaps the unit cell
// [j, j+1) x [i, i+1) with positive area. Zero-area boxes cover nothing.
OccupancyMask rasterize(std::span<const Box> boxes, int width, int height);
OccupancyMask rasterize(std::span<const Detection> detections, int width, int height);

// Pixels set in `a` and clear in `b`. Throws ArgumentError on size mismatch.
OccupancyMask mask_diff(const OccupancyMask& a, const OccupancyMask& b);
OccupancyMask mask_union(const OccupancyMask& a, const OccupancyMask& b);

std::vector<Box> boxes_of(std::span<const Detection> detections);

}  // namespace ivmod
