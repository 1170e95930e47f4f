// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include "ivmod/toy_detector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "ivmod/errors.hpp"

namespace ivmod {
namespace {

constexpr std::array<float, kCategoryCount> kLevels = {15.0f, 45.0f, 135.0f};
constexpr float kBackgroundBase = 2.5f;
constexpr int kLattice = 4;

// Band edges: geometric means of neighbouring intensity levels, the lowest
// taken against a background level of 5.
std::array<float, kCategoryCount> band_thresholds() {
  return {static_cast<float>(std::sqrt(5.0 * kLevels[0])),
          static_cast<float>(std::sqrt(double{kLevels[0]} * kLevels[1])),
          static_cast<float>(std::sqrt(double{kLevels[1]} * kLevels[2]))};
}

ConvLayer make_layer(int in, int out, int kernel, int stride, bool relu) {
  ConvLayer layer;
  layer.in_channels = in;
  layer.out_channels = out;
  layer.kernel = kernel;
  layer.stride = stride;
  layer.relu = relu;
  layer.weights.assign(static_cast<std::size_t>(out) * in * kernel * kernel, 0.0f);
  layer.bias.assign(static_cast<std::size_t>(out), 0.0f);
  return layer;
}

void fill_taps(ConvLayer& layer, int o, int c, float value) {
  for (int kh = 0; kh < layer.kernel; ++kh) {
    for (int kw = 0; kw < layer.kernel; ++kw) layer.weights[layer.weight_index(o, c, kh, kw)] = value;
  }
}

float pow2(int e) { return std::ldexp(1.0f, e); }

void check_bounds(bool ok, const std::string& what) {
  if (!ok) throw ArgumentError("fault descriptor: " + what);
}

bool is_irregular(float v) { return classify_value(v) != ValueClass::kRegular; }

struct Flags {
  bool nan = false;
  bool inf = false;
  void observe(float v) {
    switch (classify_value(v)) {
      case ValueClass::kNaN: nan = true; break;
      case ValueClass::kInf: inf = true; break;
      case ValueClass::kRegular: break;
    }
  }
};

Tensor convolve(const ConvLayer& layer, const Tensor& x, const float* weights, Flags& flags) {
  const int out_h = layer.output_extent(x.height);
  const int out_w = layer.output_extent(x.width);
  Tensor y(layer.out_channels, out_h, out_w);
  for (int o = 0; o < layer.out_channels; ++o) {
    for (int r = 0; r < out_h; ++r) {
      for (int col = 0; col < out_w; ++col) {
        float acc = layer.bias[o];
        for (int c = 0; c < layer.in_channels; ++c) {
          for (int kh = 0; kh < layer.kernel; ++kh) {
            for (int kw = 0; kw < layer.kernel; ++kw) {
              acc += weights[layer.weight_index(o, c, kh, kw)] *
                     x.at(c, r * layer.stride + kh, col * layer.stride + kw);
            }
          }
        }
        if (is_irregular(acc)) flags.observe(acc);
        if (layer.relu) acc = acc > 0.0f ? acc : 0.0f;
        y.at(o, r, col) = acc;
      }
    }
  }
  return y;
}

std::vector<Detection> decode(const Tensor& logits, const DecodeHead& head, int width,
                              int height) {
  const int rows = logits.height;
  const int cols = logits.width;
  std::vector<Detection> raw;
  std::vector<double> conf(static_cast<std::size_t>(rows) * cols);
  std::vector<int> label(conf.size());
  std::vector<int> stack;

  for (int cat = 0; cat < logits.channels; ++cat) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double z = logits.at(cat, r, c);
        // Rounded to binary32 like every other network value, so saturated
        // cells report exactly 1.
        conf[static_cast<std::size_t>(r) * cols + c] =
            static_cast<float>(1.0 / (1.0 + std::exp(-head.logit_scale * z)));
      }
    }
    // NaN confidences compare false and stay off.
    auto on = [&](int idx) { return conf[idx] > head.conf_threshold; };
    std::fill(label.begin(), label.end(), -1);

    for (int seed = 0; seed < rows * cols; ++seed) {
      if (!on(seed) || label[seed] >= 0) continue;
      // 4-connected flood fill from the first unlabeled on-cell in raster order.
      int r0 = rows, r1 = -1, c0 = cols, c1 = -1;
      label[seed] = seed;
      stack.assign(1, seed);
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int r = idx / cols;
        const int c = idx % cols;
        r0 = std::min(r0, r); r1 = std::max(r1, r);
        c0 = std::min(c0, c); c1 = std::max(c1, c);
        const std::array<std::array<int, 2>, 4> steps = {{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
        for (const auto& [dr, dc] : steps) {
          const int nr = r + dr;
          const int nc = c + dc;
          if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
          const int n = nr * cols + nc;
          if (on(n) && label[n] < 0) {
            label[n] = seed;
            stack.push_back(n);
          }
        }
      }

      for (int tr = r0; tr <= r1; tr += head.tile_cells) {
        for (int tc = c0; tc <= c1; tc += head.tile_cells) {
          int br0 = rows, br1 = -1, bc0 = cols, bc1 = -1;
          double best = 0.0;
          for (int r = tr; r <= std::min(r1, tr + head.tile_cells - 1); ++r) {
            for (int c = tc; c <= std::min(c1, tc + head.tile_cells - 1); ++c) {
              const int idx = r * cols + c;
              if (label[idx] != seed) continue;
              br0 = std::min(br0, r); br1 = std::max(br1, r);
              bc0 = std::min(bc0, c); bc1 = std::max(bc1, c);
              best = std::max(best, conf[idx]);
            }
          }
          if (br1 < 0) continue;
          const double s = head.cell_size;
          const Box box = clip(Box{bc0 * s, br0 * s, (bc1 + 1) * s, (br1 + 1) * s}, width, height);
          raw.push_back(Detection{box, cat, best});
        }
      }
    }
  }
  return nms(raw, head.nms_iou, head.max_detections);
}

}  // namespace

DetectorModel DetectorModel::analytic(int width, int height) {
  if (width <= 0 || height <= 0 || width % kLattice != 0 || height % kLattice != 0) {
    throw ArgumentError("analytic model: dimensions must be positive multiples of 4");
  }
  const auto thr = band_thresholds();
  DetectorModel model;
  model.width_ = width;
  model.height_ = height;

  // Layer 0, 1x1: channels 0..2 open at each band's lower edge, 3..4 are
  // steep detectors for the next band up, 5 carries shifted luminance.
  ConvLayer l0 = make_layer(1, 6, 1, 1, true);
  const float gentle = pow2(-4);
  const float steep = 0.5f;
  for (int c = 0; c < kCategoryCount; ++c) {
    l0.weights[l0.weight_index(c, 0, 0, 0)] = gentle;
    l0.bias[c] = -gentle * thr[c];
  }
  for (int c = 0; c < 2; ++c) {
    l0.weights[l0.weight_index(3 + c, 0, 0, 0)] = steep;
    l0.bias[3 + c] = -steep * thr[c + 1];
  }
  l0.weights[l0.weight_index(5, 0, 0, 0)] = gentle;
  l0.bias[5] = 2.0f;

  // Layer 1, 2x2 stride 2: band c minus the band above, small cross talk.
  ConvLayer l1 = make_layer(6, 3, 2, 2, true);
  for (int c = 0; c < kCategoryCount; ++c) {
    for (int k = 0; k < 6; ++k) {
      float v;
      if (k == c) {
        v = 0.25f;
      } else if (c < 2 && k == 3 + c) {
        v = -0.25f;
      } else if (k < 3) {
        v = -pow2(-8);
      } else if (k < 5) {
        v = -pow2(-10);
      } else {
        v = pow2(-18);
      }
      fill_taps(l1, c, k, v);
    }
  }

  // Layer 2, 2x2 stride 2: per-category gain onto the 4 px cell grid.
  ConvLayer l2 = make_layer(3, 3, 2, 2, true);
  const std::array<float, kCategoryCount> gain = {0.5f, 0.25f, 0.0625f};
  for (int c = 0; c < kCategoryCount; ++c) {
    for (int k = 0; k < kCategoryCount; ++k) fill_taps(l2, c, k, k == c ? gain[c] : pow2(-9));
  }

  // Layer 3, 1x1 linear head.
  ConvLayer l3 = make_layer(3, 3, 1, 1, false);
  for (int c = 0; c < kCategoryCount; ++c) {
    for (int k = 0; k < kCategoryCount; ++k) fill_taps(l3, c, k, k == c ? 0.5f : -pow2(-8));
    l3.bias[c] = -0.125f;
  }

  model.layers_ = {std::move(l0), std::move(l1), std::move(l2), std::move(l3)};
  return model;
}

ShapeCatalog DetectorModel::shape_catalog() const {
  ShapeCatalog catalog;
  int h = height_;
  int w = width_;
  for (const auto& layer : layers_) {
    h = layer.output_extent(h);
    w = layer.output_extent(w);
    catalog.push_back(LayerShapes{{layer.out_channels, h, w},
                                  {layer.out_channels, layer.in_channels, layer.kernel, layer.kernel}});
  }
  return catalog;
}

void DetectorModel::validate(const FaultDescriptor& fault) const {
  check_bounds(fault.layer >= 0 && fault.layer < static_cast<int>(layers_.size()),
               "layer " + std::to_string(fault.layer) + " out of range");
  const auto catalog = shape_catalog();
  const auto& shape = fault.target == FaultTarget::kNeuron ? catalog[fault.layer].neuron
                                                           : catalog[fault.layer].weight;
  check_bounds(fault.coords.size() == shape.size(),
               "expected " + std::to_string(shape.size()) + " coordinates");
  for (std::size_t d = 0; d < shape.size(); ++d) {
    check_bounds(fault.coords[d] >= 0 && fault.coords[d] < shape[d],
                 "coordinate " + std::to_string(d) + " out of range");
  }
  check_bounds(fault.bit.index >= 0 && fault.bit.index < BitPosition::kFloat32Width,
               "bit index out of range");
}

DetectorModel DetectorModel::with_fault(const FaultDescriptor& fault) const {
  if (fault.target != FaultTarget::kWeight) {
    throw ArgumentError("with_fault: only weight faults can be baked into a model");
  }
  validate(fault);
  DetectorModel copy = *this;
  ConvLayer& layer = copy.layers_[fault.layer];
  const auto& k = fault.coords;
  float& w = layer.weights[layer.weight_index(k[0], k[1], k[2], k[3])];
  w = apply_fault(w, fault.bit, fault.mode);
  return copy;
}

std::vector<Detection> Scene::ground_truth() const {
  std::vector<Detection> gts;
  gts.reserve(objects.size());
  for (const auto& obj : objects) gts.push_back(Detection{obj.box, obj.category, 1.0});
  return gts;
}

namespace {

std::vector<float> background(int width, int height) {
  std::vector<float> pixels(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const float g = 0.5f + 0.25f * std::sin(static_cast<float>(x) / 13.0f) +
                      0.25f * std::cos(static_cast<float>(y) / 17.0f);
      pixels[static_cast<std::size_t>(y) * width + x] = kBackgroundBase + 2.0f * g;
    }
  }
  return pixels;
}

void paint(Scene& scene, const SceneObject& obj) {
  const int x0 = static_cast<int>(obj.box.x1);
  const int y0 = static_cast<int>(obj.box.y1);
  const int x1 = static_cast<int>(obj.box.x2);
  const int y1 = static_cast<int>(obj.box.y2);
  for (int y = std::max(y0, 0); y < std::min(y1, scene.height); ++y) {
    for (int x = std::max(x0, 0); x < std::min(x1, scene.width); ++x) {
      const float texture = 1.0f + 0.03f * std::sin(static_cast<float>(x + y) / 3.0f);
      scene.pixels[static_cast<std::size_t>(y) * scene.width + x] = obj.intensity * texture;
    }
  }
}

bool separated(const Box& a, const Box& b) {
  constexpr double gap = kLattice;
  return a.x2 + gap <= b.x1 || b.x2 + gap <= a.x1 || a.y2 + gap <= b.y1 || b.y2 + gap <= a.y1;
}

int lattice_draw(std::mt19937_64& rng, int lo, int hi) {
  return kLattice * std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

Scene generate_scene(const SceneSpec& spec, std::uint64_t seed) {
  if (spec.width < kLattice || spec.height < kLattice || spec.min_objects < 0 ||
      spec.min_objects > spec.max_objects || spec.min_size < kLattice ||
      spec.min_size > spec.max_size || spec.max_size > std::min(spec.width, spec.height) ||
      spec.max_attempts < 1) {
    throw ArgumentError("generate_scene: invalid scene spec");
  }
  std::mt19937_64 rng(seed);
  Scene scene;
  scene.width = spec.width;
  scene.height = spec.height;
  scene.pixels = background(spec.width, spec.height);

  const int count = std::uniform_int_distribution<int>(spec.min_objects, spec.max_objects)(rng);
  const int size_lo = (spec.min_size + kLattice - 1) / kLattice;
  const int size_hi = spec.max_size / kLattice;
  for (int k = 0; k < count; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < spec.max_attempts && !placed; ++attempt) {
      const int w = lattice_draw(rng, size_lo, size_hi);
      const int h = lattice_draw(rng, size_lo, size_hi);
      const int x = lattice_draw(rng, 0, (spec.width - w) / kLattice);
      const int y = lattice_draw(rng, 0, (spec.height - h) / kLattice);
      const int category = std::uniform_int_distribution<int>(0, kCategoryCount - 1)(rng);
      const Box box{double(x), double(y), double(x + w), double(y + h)};
      const bool fits = std::all_of(scene.objects.begin(), scene.objects.end(),
                                    [&](const SceneObject& o) { return separated(o.box, box); });
      if (!fits) continue;
      scene.objects.push_back(SceneObject{box, category, kLevels[category]});
      placed = true;
    }
    if (!placed) {
      throw ArgumentError("generate_scene: could not place object " + std::to_string(k) +
                          " after " + std::to_string(spec.max_attempts) + " attempts");
    }
  }
  for (const auto& obj : scene.objects) paint(scene, obj);
  return scene;
}

std::vector<Scene> generate_sequence(const SequenceSpec& spec, std::uint64_t seed) {
  constexpr int kLaneRows = 32;
  const int lanes = spec.height / kLaneRows;
  if (spec.frames < 1 || spec.width < 32 || lanes < 1 || spec.min_objects < 0 ||
      spec.min_objects > spec.max_objects || spec.max_objects > lanes ||
      spec.width % kLattice != 0 || spec.height % kLattice != 0) {
    throw ArgumentError("generate_sequence: invalid sequence spec");
  }
  std::mt19937_64 rng(seed);
  const int count = std::uniform_int_distribution<int>(spec.min_objects, spec.max_objects)(rng);

  std::vector<int> lane_ids(static_cast<std::size_t>(lanes));
  for (int l = 0; l < lanes; ++l) lane_ids[l] = l;
  std::shuffle(lane_ids.begin(), lane_ids.end(), rng);

  struct Mover {
    SceneObject obj;
    int vx;
  };
  std::vector<Mover> movers;
  for (int k = 0; k < count; ++k) {
    const int lane_top = lane_ids[k] * kLaneRows;
    const int w = lattice_draw(rng, 2, 6);
    const int h = lattice_draw(rng, 2, 6);
    // Keep a 4 px gap to the next lane.
    const int y = lane_top + lattice_draw(rng, 0, (kLaneRows - kLattice - h) / kLattice);
    const int x = lattice_draw(rng, 0, (spec.width - w) / kLattice);
    const int category = std::uniform_int_distribution<int>(0, kCategoryCount - 1)(rng);
    const int vx = kLattice * std::uniform_int_distribution<int>(-1, 1)(rng);
    movers.push_back(Mover{SceneObject{Box{double(x), double(y), double(x + w), double(y + h)},
                                       category, kLevels[category]},
                           vx});
  }

  const auto base = background(spec.width, spec.height);
  std::vector<Scene> frames;
  frames.reserve(static_cast<std::size_t>(spec.frames));
  for (int t = 0; t < spec.frames; ++t) {
    Scene scene;
    scene.width = spec.width;
    scene.height = spec.height;
    scene.pixels = base;
    for (const auto& m : movers) scene.objects.push_back(m.obj);
    for (const auto& obj : scene.objects) paint(scene, obj);
    frames.push_back(std::move(scene));

    for (auto& m : movers) {
      Box& b = m.obj.box;
      if (b.x1 + m.vx < 0 || b.x2 + m.vx > spec.width) m.vx = -m.vx;
      b.x1 += m.vx;
      b.x2 += m.vx;
    }
  }
  return frames;
}

InferenceTrace infer(const DetectorModel& model, const Scene& scene,
                     const std::optional<FaultDescriptor>& fault, bool keep_activations) {
  if (scene.width != model.input_width() || scene.height != model.input_height()) {
    throw ArgumentError("infer: scene size does not match the model input");
  }
  if (fault) model.validate(*fault);

  Tensor x(1, scene.height, scene.width);
  x.data = scene.pixels;

  Flags flags;
  InferenceTrace trace;
  std::vector<float> faulty_weights;
  for (std::size_t li = 0; li < model.layers().size(); ++li) {
    const ConvLayer& layer = model.layers()[li];
    const bool here = fault && fault->layer == static_cast<int>(li);
    const float* weights = layer.weights.data();
    if (here && fault->target == FaultTarget::kWeight) {
      faulty_weights = layer.weights;
      const auto& k = fault->coords;
      float& w = faulty_weights[layer.weight_index(k[0], k[1], k[2], k[3])];
      w = apply_fault(w, fault->bit, fault->mode);
      weights = faulty_weights.data();
    }
    x = convolve(layer, x, weights, flags);
    if (here && fault->target == FaultTarget::kNeuron) {
      const auto& k = fault->coords;
      float& v = x.at(k[0], k[1], k[2]);
      v = apply_fault(v, fault->bit, fault->mode);
      flags.observe(v);
    }
    if (keep_activations) trace.activations.push_back(x);
  }

  trace.detections = decode(x, model.head(), scene.width, scene.height);
  trace.nan_seen = flags.nan;
  trace.inf_seen = flags.inf;
  return trace;
}

}  // namespace ivmod
