// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0
//
// A small convolutional detector with hand-set weights and the synthetic
// scenes it is built for. Objects are flat rectangles whose intensity codes
// their category; the network thresholds intensity bands, pools to a 4 px
// cell grid and scores every cell per category. Decoding groups on-cells into
// connected components and emits one box per 6x6-cell tile of a component.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ivmod/fault_model.hpp"
#include "ivmod/geometry.hpp"

namespace ivmod {

inline constexpr int kCategoryCount = 3;

struct Tensor {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> data;

  Tensor() = default;
  Tensor(int c, int h, int w) : channels(c), height(h), width(w),
      data(static_cast<std::size_t>(c) * h * w, 0.0f) {}

  [[nodiscard]] std::size_t index(int c, int r, int col) const {
    return (static_cast<std::size_t>(c) * height + r) * width + col;
  }
  float& at(int c, int r, int col) { return data[index(c, r, col)]; }
  [[nodiscard]] float at(int c, int r, int col) const { return data[index(c, r, col)]; }
};

struct ConvLayer {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 1;
  int stride = 1;
  bool relu = true;
  std::vector<float> weights;  // O, C, KH, KW
  std::vector<float> bias;     // O

  [[nodiscard]] std::size_t weight_index(int o, int c, int kh, int kw) const {
    return ((static_cast<std::size_t>(o) * in_channels + c) * kernel + kh) * kernel + kw;
  }
  [[nodiscard]] int output_extent(int input_extent) const {
    return (input_extent - kernel) / stride + 1;
  }
};

struct DecodeHead {
  double logit_scale = 128.0;       // confidence = sigmoid(logit_scale * z)
  double conf_threshold = 0.5;      // cell is on when confidence exceeds this
  double nms_iou = 0.5;
  std::size_t max_detections = kDefaultMaxDetections;
  int cell_size = 4;                // px per output cell
  int tile_cells = 6;               // max box side, in cells
};

class DetectorModel {
 public:
  // The hand-set four-layer model for width x height scenes (multiples of 4).
  static DetectorModel analytic(int width = 96, int height = 96);

  [[nodiscard]] const std::vector<ConvLayer>& layers() const { return layers_; }
  [[nodiscard]] const DecodeHead& head() const { return head_; }
  [[nodiscard]] int input_width() const { return width_; }
  [[nodiscard]] int input_height() const { return height_; }

  // Neuron (C,H,W) and weight (O,C,KH,KW) shapes of every layer.
  [[nodiscard]] ShapeCatalog shape_catalog() const;

  // Copy with one weight corrupted. Throws ArgumentError unless `fault`
  // targets a valid weight coordinate.
  [[nodiscard]] DetectorModel with_fault(const FaultDescriptor& fault) const;

  // Throws ArgumentError when layer, coordinates or bit are out of range.
  void validate(const FaultDescriptor& fault) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<ConvLayer> layers_;
  DecodeHead head_;
};

struct SceneObject {
  Box box;
  int category = 0;
  float intensity = 0.0f;
};

struct Scene {
  int width = 0;
  int height = 0;
  std::vector<SceneObject> objects;
  std::vector<float> pixels;  // row-major, single channel

  [[nodiscard]] std::vector<Detection> ground_truth() const;
};

struct SceneSpec {
  int width = 96;
  int height = 96;
  int min_objects = 1;
  int max_objects = 5;
  int min_size = 8;   // px, rounded to multiples of 4
  int max_size = 24;
  int max_attempts = 500;  // placement retries per object
};

// Deterministic per seed. Objects sit on a 4 px lattice and keep a 4 px gap.
// Throws ArgumentError on invalid ranges, and on packing failure once the
// retries are exhausted.
Scene generate_scene(const SceneSpec& spec, std::uint64_t seed);

struct SequenceSpec {
  int frames = 60;
  int width = 96;
  int height = 96;
  int min_objects = 1;
  int max_objects = 3;  // at most one object per 32-row lane
};

// Objects glide horizontally at -4, 0 or +4 px per frame in disjoint lanes and
// bounce off the image border.
std::vector<Scene> generate_sequence(const SequenceSpec& spec, std::uint64_t seed);

struct InferenceTrace {
  std::vector<Detection> detections;
  bool nan_seen = false;
  bool inf_seen = false;
  std::vector<Tensor> activations;  // per layer, only when requested
};

// Forward pass in binary32. A weight fault corrupts the weight before use; a
// neuron fault corrupts one activation right after the layer's nonlinearity.
// Both pre- and post-activation values feed the NaN/Inf flags.
InferenceTrace infer(const DetectorModel& model, const Scene& scene,
                     const std::optional<FaultDescriptor>& fault = std::nullopt,
                     bool keep_activations = false);

}  // namespace ivmod
