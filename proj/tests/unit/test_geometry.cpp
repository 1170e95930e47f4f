// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "ivmod/errors.hpp"
#include "ivmod/geometry.hpp"
#include "oracles.hpp"

namespace {

using namespace ivmod;

TEST(Iou, IdentityIsOne) {
  EXPECT_EQ(iou(Box{0, 0, 10, 10}, Box{0, 0, 10, 10}), 1.0);
}

TEST(Iou, HalfShiftIsOneThird) {
  const Box a{0, 0, 10, 10};
  const Box b{5, 0, 15, 10};
  EXPECT_DOUBLE_EQ(iou(a, b), oracle::grid_iou(a, b));
  EXPECT_DOUBLE_EQ(iou(a, b), 1.0 / 3.0);
}

TEST(Iou, DisjointAndDegenerate) {
  EXPECT_EQ(iou(Box{0, 0, 1, 1}, Box{2, 2, 3, 3}), 0.0);
  EXPECT_EQ(iou(Box{1, 1, 1, 5}, Box{1, 1, 1, 5}), 0.0);
}

TEST(Iou, SymmetricBoundedAgainstGridOracle) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> coord(0, 40);
  for (int k = 0; k < 300; ++k) {
    Box a = Box{coord(rng) * 0.5, coord(rng) * 0.5, coord(rng) * 0.5, coord(rng) * 0.5}.normalized();
    Box b = Box{coord(rng) * 0.5, coord(rng) * 0.5, coord(rng) * 0.5, coord(rng) * 0.5}.normalized();
    const double v = iou(a, b);
    ASSERT_EQ(v, iou(b, a));
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 1.0);
    ASSERT_NEAR(v, oracle::grid_iou(a, b), 1e-12);
  }
}

TEST(Clip, Examples) {
  EXPECT_EQ(clip(Box{-5, -5, 5, 5}, 100, 100), (Box{0, 0, 5, 5}));
  EXPECT_EQ(clip(Box{90, 90, 200, 200}, 100, 100), (Box{90, 90, 100, 100}));
  const Box outside = clip(Box{150, 150, 200, 200}, 100, 100);
  EXPECT_EQ(outside, (Box{100, 100, 100, 100}));
  EXPECT_EQ(outside.area(), 0.0);
}

TEST(Nms, IdenticalBoxesKeepHighest) {
  const std::vector<Detection> dets = {{Box{0, 0, 10, 10}, 0, 0.8}, {Box{0, 0, 10, 10}, 0, 0.9}};
  const auto kept = nms(dets, 0.5);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].confidence, 0.9);
}

TEST(Nms, OtherCategoryNotSuppressed) {
  const std::vector<Detection> dets = {{Box{0, 0, 10, 10}, 0, 0.8}, {Box{0, 0, 10, 10}, 1, 0.9}};
  EXPECT_EQ(nms(dets, 0.5).size(), 2u);
}

TEST(Nms, DisjointKeptAndCapped) {
  std::vector<Detection> dets;
  for (int k = 0; k < 1500; ++k) {
    const double x = (k % 50) * 3.0;
    const double y = (k / 50) * 3.0;
    dets.push_back(Detection{Box{x, y, x + 2, y + 2}, 0, (k + 1) / 1500.0});
  }
  const auto kept = nms(dets, 0.5);
  ASSERT_EQ(kept.size(), 1000u);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    EXPECT_EQ(kept[k].confidence, (1500 - k) / 1500.0);
  }
}

TEST(Nms, SurvivorsRespectThreshold) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> pos(0, 50), size(2, 20), conf(0, 1);
  std::vector<Detection> dets;
  for (int k = 0; k < 200; ++k) {
    const double x = pos(rng), y = pos(rng);
    dets.push_back({Box{x, y, x + size(rng), y + size(rng)}, static_cast<int>(k % 3), conf(rng)});
  }
  const auto kept = nms(dets, 0.4);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i > 0) ASSERT_GE(kept[i - 1].confidence, kept[i].confidence);
    ASSERT_NE(std::find(dets.begin(), dets.end(), kept[i]), dets.end());
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      if (kept[i].category == kept[j].category) ASSERT_LE(iou(kept[i].box, kept[j].box), 0.4);
    }
  }
}

TEST(Rasterize, Examples) {
  const std::vector<Box> one = {Box{10, 10, 30, 30}};
  EXPECT_EQ(rasterize(one, 100, 100).popcount(), 400u);
  const std::vector<Box> two = {Box{10, 10, 30, 30}, Box{10, 10, 30, 30}};
  EXPECT_EQ(rasterize(two, 100, 100).popcount(), 400u);
  EXPECT_EQ(rasterize(std::vector<Box>{}, 100, 100).popcount(), 0u);
}

TEST(Rasterize, ZeroWidthCoversNothing) {
  const std::vector<Box> flat = {Box{5, 5, 5, 20}, Box{0, 7, 30, 7}};
  EXPECT_EQ(rasterize(flat, 40, 40).popcount(), 0u);
}

TEST(Rasterize, FractionalBoxesMatchPixelOracle) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> pos(-5, 45);
  for (int k = 0; k < 100; ++k) {
    std::vector<Box> boxes;
    for (int b = 0; b < 3; ++b) boxes.push_back(Box{pos(rng), pos(rng), pos(rng), pos(rng)}.normalized());
    ASSERT_EQ(rasterize(boxes, 40, 30).popcount(), oracle::pixel_count(boxes, 40, 30));
  }
}

TEST(Rasterize, UnionProperty) {
  const std::vector<Box> a = {Box{1.5, 2, 9, 9.5}};
  const std::vector<Box> b = {Box{5, 5, 20.2, 12}};
  std::vector<Box> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  EXPECT_EQ(rasterize(ab, 32, 32), mask_union(rasterize(a, 32, 32), rasterize(b, 32, 32)));
}

TEST(MaskDiff, Examples) {
  OccupancyMask full(10, 20), empty(10, 20);
  full.fill(0, 20, 0, 10);
  EXPECT_EQ(mask_diff(full, full).popcount(), 0u);
  EXPECT_EQ(mask_diff(full, empty), full);

  OccupancyMask a(10, 20), b(10, 20), expect(10, 20);
  a.fill(0, 10, 0, 10);
  b.fill(5, 15, 0, 10);
  expect.fill(0, 5, 0, 10);
  EXPECT_EQ(mask_diff(a, b), expect);
}

TEST(MaskDiff, DimensionMismatchThrows) {
  EXPECT_THROW(mask_diff(OccupancyMask(3, 3), OccupancyMask(3, 4)), ArgumentError);
}

}  // namespace
