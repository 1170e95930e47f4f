// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "ivmod/errors.hpp"
#include "ivmod/matching.hpp"
#include "ivmod/toy_detector.hpp"

namespace {

using namespace ivmod;

bool bit_identical(const Tensor& a, const Tensor& b) {
  if (a.data.size() != b.data.size()) return false;
  for (std::size_t k = 0; k < a.data.size(); ++k) {
    if (std::bit_cast<std::uint32_t>(a.data[k]) != std::bit_cast<std::uint32_t>(b.data[k])) return false;
  }
  return true;
}

TEST(Scene, ObjectCountAndDeterminism) {
  SceneSpec spec;
  spec.min_objects = spec.max_objects = 3;
  const Scene a = generate_scene(spec, 42);
  EXPECT_EQ(a.ground_truth().size(), 3u);
  const Scene b = generate_scene(spec, 42);
  EXPECT_EQ(a.pixels, b.pixels);
  for (const auto& o : a.objects) {
    EXPECT_GE(o.box.x1, 0.0);
    EXPECT_LE(o.box.x2, spec.width);
    EXPECT_LE(o.box.y2, spec.height);
  }
}

TEST(Scene, EmptySceneHasBackground) {
  SceneSpec spec;
  spec.min_objects = spec.max_objects = 0;
  const Scene s = generate_scene(spec, 1);
  EXPECT_TRUE(s.ground_truth().empty());
  for (float p : s.pixels) ASSERT_GT(p, 0.0f);
}

TEST(Scene, InfeasiblePackingThrows) {
  SceneSpec spec;
  spec.min_objects = spec.max_objects = 40;
  spec.min_size = spec.max_size = 24;
  spec.max_attempts = 50;
  EXPECT_THROW(generate_scene(spec, 1), ArgumentError);
  spec.min_objects = 50;
  EXPECT_THROW(generate_scene(spec, 1), ArgumentError);
}

TEST(Model, ShapeCatalog) {
  const auto model = DetectorModel::analytic();
  const auto catalog = model.shape_catalog();
  ASSERT_EQ(catalog.size(), 4u);
  EXPECT_EQ(catalog[0].neuron, (std::vector<int>{6, 96, 96}));
  EXPECT_EQ(catalog[1].weight, (std::vector<int>{3, 6, 2, 2}));
  EXPECT_EQ(catalog[3].neuron, (std::vector<int>{3, 24, 24}));
  EXPECT_EQ(catalog, model.shape_catalog());

  const auto trace = infer(model, generate_scene(SceneSpec{}, 3), std::nullopt, true);
  ASSERT_EQ(trace.activations.size(), catalog.size());
  for (std::size_t l = 0; l < catalog.size(); ++l) {
    EXPECT_EQ(trace.activations[l].data.size(), element_count(catalog[l].neuron));
  }
}

TEST(Model, ParametersFiniteAndSmall) {
  const auto model = DetectorModel::analytic();
  for (const auto& layer : model.layers()) {
    for (float w : layer.weights) {
      ASSERT_TRUE(std::isfinite(w));
      ASSERT_LE(std::abs(w), 0.5f);
    }
  }
}

TEST(Infer, BaselineQuality) {
  const auto model = DetectorModel::analytic();
  int clean = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Scene scene = generate_scene(SceneSpec{}, seed);
    const auto trace = infer(model, scene);
    EXPECT_FALSE(trace.nan_seen || trace.inf_seen);
    const auto m = assign(trace.detections, scene.ground_truth());
    clean += (m.fp == 0 && m.fn == 0) ? 1 : 0;
  }
  EXPECT_GE(clean, 95);
}

TEST(Infer, ThreeClearObjects) {
  SceneSpec spec;
  spec.min_objects = spec.max_objects = 3;
  const Scene scene = generate_scene(spec, 7);
  const auto trace = infer(DetectorModel::analytic(), scene);
  ASSERT_EQ(trace.detections.size(), 3u);
  EXPECT_EQ(assign(trace.detections, scene.ground_truth()).tp, 3u);
}

TEST(Infer, Deterministic) {
  const auto model = DetectorModel::analytic();
  const Scene scene = generate_scene(SceneSpec{}, 11);
  const auto a = infer(model, scene, std::nullopt, true);
  const auto b = infer(model, scene, std::nullopt, true);
  EXPECT_EQ(a.detections, b.detections);
  for (std::size_t l = 0; l < a.activations.size(); ++l) {
    EXPECT_TRUE(bit_identical(a.activations[l], b.activations[l]));
  }
}

TEST(Infer, NeuronFaultLeavesEarlierLayersUntouched) {
  const auto model = DetectorModel::analytic();
  const Scene scene = generate_scene(SceneSpec{}, 12);
  const auto clean = infer(model, scene, std::nullopt, true);
  for (int layer = 0; layer < 4; ++layer) {
    FaultDescriptor f{FaultTarget::kNeuron, layer, {0, 1, 1}, BitPosition{30},
                      FaultMode::kTransientFlip};
    const auto faulty = infer(model, scene, f, true);
    for (int l = 0; l < layer; ++l) EXPECT_TRUE(bit_identical(clean.activations[l], faulty.activations[l]));
    EXPECT_FALSE(bit_identical(clean.activations[layer], faulty.activations[layer]));
  }
}

TEST(Infer, ExponentMsbFlipOnPositiveActivation) {
  const auto model = DetectorModel::analytic();
  const Scene scene = generate_scene(SceneSpec{}, 13);
  const auto clean = infer(model, scene, std::nullopt, true);
  // Luminance channel of the first layer is positive everywhere.
  const float before = clean.activations[0].at(5, 10, 10);
  ASSERT_GT(before, 1.0f);
  FaultDescriptor f{FaultTarget::kNeuron, 0, {5, 10, 10}, BitPosition{30}, FaultMode::kTransientFlip};
  const auto faulty = infer(model, scene, f, true);
  const float after = faulty.activations[0].at(5, 10, 10);
  // Values in [2, 4) carry the exponent MSB, so the flip collapses them.
  ASSERT_LT(before, 4.0f);
  EXPECT_LT(std::abs(after), 1e-30f);
}

TEST(Infer, MantissaWeightFaultIsNeutral) {
  const auto model = DetectorModel::analytic();
  const Scene scene = generate_scene(SceneSpec{}, 14);
  const auto clean = infer(model, scene);
  const auto catalog = model.shape_catalog();
  for (int layer = 0; layer < 4; ++layer) {
    FaultDescriptor f{FaultTarget::kWeight, layer, {0, 0, 0, 0}, BitPosition{3},
                      FaultMode::kTransientFlip};
    EXPECT_EQ(infer(model, scene, f).detections, clean.detections);
  }
}

TEST(Infer, StuckAtOneOnSetBitIsIdentity) {
  const auto model = DetectorModel::analytic();
  const Scene scene = generate_scene(SceneSpec{}, 15);
  const auto clean = infer(model, scene, std::nullopt, true);
  // 0.25 = 0x3E800000 has bits 29..25 and 23 set.
  FaultDescriptor f{FaultTarget::kWeight, 1, {0, 0, 0, 0}, BitPosition{29}, FaultMode::kStuckAt1};
  ASSERT_EQ(model.layers()[1].weights[0], 0.25f);
  const auto faulty = infer(model, scene, f, true);
  EXPECT_EQ(faulty.detections, clean.detections);
  for (std::size_t l = 0; l < clean.activations.size(); ++l) {
    EXPECT_TRUE(bit_identical(clean.activations[l], faulty.activations[l]));
  }
}

TEST(Infer, WithFaultMatchesPerCallWeightFault) {
  const auto model = DetectorModel::analytic();
  const Scene scene = generate_scene(SceneSpec{}, 16);
  FaultDescriptor f{FaultTarget::kWeight, 2, {1, 1, 0, 1}, BitPosition{30}, FaultMode::kStuckAt1};
  EXPECT_EQ(infer(model.with_fault(f), scene).detections, infer(model, scene, f).detections);
}

TEST(Infer, InvalidDescriptorsThrow) {
  const auto model = DetectorModel::analytic();
  const Scene scene = generate_scene(SceneSpec{}, 1);
  FaultDescriptor f{FaultTarget::kNeuron, 4, {0, 0, 0}, BitPosition{1}, FaultMode::kTransientFlip};
  EXPECT_THROW(infer(model, scene, f), ArgumentError);
  f.layer = 3;
  f.coords = {0, 24, 0};
  EXPECT_THROW(infer(model, scene, f), ArgumentError);
  f.coords = {0, 0};
  EXPECT_THROW(infer(model, scene, f), ArgumentError);
  f.coords = {0, 0, 0};
  f.bit.index = 32;
  EXPECT_THROW(infer(model, scene, f), ArgumentError);
  f.bit.index = 3;
  EXPECT_THROW((void)model.with_fault(f), ArgumentError);
}

TEST(Sequence, LanesStayDisjointAndDetectable) {
  SequenceSpec spec;
  spec.frames = 30;
  spec.min_objects = spec.max_objects = 3;
  const auto frames = generate_sequence(spec, 5);
  ASSERT_EQ(frames.size(), 30u);
  const auto model = DetectorModel::analytic();
  for (const auto& scene : frames) {
    const auto gts = scene.ground_truth();
    ASSERT_EQ(gts.size(), 3u);
    for (std::size_t i = 0; i < gts.size(); ++i) {
      for (std::size_t j = i + 1; j < gts.size(); ++j) ASSERT_EQ(iou(gts[i].box, gts[j].box), 0.0);
    }
    const auto m = assign(infer(model, scene).detections, gts);
    EXPECT_EQ(m.fp + m.fn, 0u);
  }
}

}  // namespace
