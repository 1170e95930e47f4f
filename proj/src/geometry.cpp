// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include "ivmod/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ivmod/errors.hpp"

namespace ivmod {

Box Box::normalized() const {
  return Box{std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)};
}

double Box::area() const {
  const double w = x2 - x1;
  const double h = y2 - y1;
  return (w > 0.0 && h > 0.0) ? w * h : 0.0;
}

OccupancyMask::OccupancyMask(int width, int height)
    : width_(width), height_(height),
      bits_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), 0) {
  if (width < 0 || height < 0) throw ArgumentError("OccupancyMask: negative dimensions");
}

void OccupancyMask::fill(int row0, int row1, int col0, int col1) {
  row0 = std::max(row0, 0);
  col0 = std::max(col0, 0);
  row1 = std::min(row1, height_);
  col1 = std::min(col1, width_);
  for (int r = row0; r < row1; ++r) {
    auto* line = bits_.data() + static_cast<std::size_t>(r) * width_;
    std::fill(line + col0, line + std::max(col0, col1), std::uint8_t{1});
  }
}

std::size_t OccupancyMask::popcount() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

double iou(const Box& a, const Box& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

Box clip(const Box& box, double width, double height) {
  const Box n = box.normalized();
  return Box{std::clamp(n.x1, 0.0, width), std::clamp(n.y1, 0.0, height),
             std::clamp(n.x2, 0.0, width), std::clamp(n.y2, 0.0, height)};
}

std::vector<Detection> nms(std::span<const Detection> detections, double iou_threshold,
                           std::size_t max_detections) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].confidence > detections[b].confidence;
  });

  std::map<int, std::vector<std::size_t>> kept_by_category;
  std::vector<Detection> kept;
  for (std::size_t idx : order) {
    if (kept.size() >= max_detections) break;
    const Detection& candidate = detections[idx];
    auto& same = kept_by_category[candidate.category];
    const bool suppressed = std::any_of(same.begin(), same.end(), [&](std::size_t k) {
      return iou(kept[k].box, candidate.box) > iou_threshold;
    });
    if (suppressed) continue;
    same.push_back(kept.size());
    kept.push_back(candidate);
  }
  return kept;
}

OccupancyMask rasterize(std::span<const Box> boxes, int width, int height) {
  OccupancyMask mask(width, height);
  for (const Box& raw : boxes) {
    const Box b = raw.normalized();
    if (!(b.x2 > b.x1 && b.y2 > b.y1)) continue;
    // Cell j overlaps [x1,x2) with positive length iff j < x2 and j + 1 > x1.
    const double c0 = std::floor(b.x1);
    const double c1 = std::ceil(b.x2);
    const double r0 = std::floor(b.y1);
    const double r1 = std::ceil(b.y2);
    if (c1 <= 0.0 || r1 <= 0.0 || c0 >= width || r0 >= height) continue;
    mask.fill(static_cast<int>(std::max(r0, 0.0)), static_cast<int>(std::min<double>(r1, height)),
              static_cast<int>(std::max(c0, 0.0)), static_cast<int>(std::min<double>(c1, width)));
  }
  return mask;
}

std::vector<Box> boxes_of(std::span<const Detection> detections) {
  std::vector<Box> boxes;
  boxes.reserve(detections.size());
  for (const auto& d : detections) boxes.push_back(d.box);
  return boxes;
}

OccupancyMask rasterize(std::span<const Detection> detections, int width, int height) {
  const auto boxes = boxes_of(detections);
  return rasterize(std::span<const Box>(boxes), width, height);
}

namespace {

void check_same_dims(const OccupancyMask& a, const OccupancyMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ArgumentError("occupancy masks differ in dimensions");
  }
}

}  // namespace

OccupancyMask mask_diff(const OccupancyMask& a, const OccupancyMask& b) {
  check_same_dims(a, b);
  OccupancyMask out(a.width(), a.height());
  for (int r = 0; r < a.height(); ++r) {
    for (int c = 0; c < a.width(); ++c) {
      if (a.test(r, c) && !b.test(r, c)) out.set(r, c);
    }
  }
  return out;
}

OccupancyMask mask_union(const OccupancyMask& a, const OccupancyMask& b) {
  check_same_dims(a, b);
  OccupancyMask out(a.width(), a.height());
  for (int r = 0; r < a.height(); ++r) {
    for (int c = 0; c < a.width(); ++c) {
      if (a.test(r, c) || b.test(r, c)) out.set(r, c);
    }
  }
  return out;
}

}  // namespace ivmod
