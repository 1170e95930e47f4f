// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0
//
// Bit-level fault vocabulary: transient flips and permanent stuck-at faults on
// IEEE-754 binary32 values and on bfloat16 values (which share the 8-bit
// exponent). All corruption happens on raw bit patterns, so NaN payloads
// survive a round trip untouched.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ivmod {

enum class FaultTarget { kNeuron, kWeight };
enum class FaultMode { kTransientFlip, kStuckAt0, kStuckAt1 };
enum class BitPolicy { kAll32, kExponentOnly };
enum class ValueClass { kRegular, kInf, kNaN };

// Bit index inside a floating-point word. For binary32, 31 is the sign,
// 30..23 the exponent (30 = exponent MSB) and 22..0 the mantissa. For
// bfloat16 the layout is 15 / 14..7 / 6..0.
struct BitPosition {
  int index = 0;

  static constexpr int kFloat32Width = 32;
  static constexpr int kBFloat16Width = 16;

  [[nodiscard]] constexpr bool is_sign(int width = kFloat32Width) const {
    return index == width - 1;
  }
  [[nodiscard]] constexpr bool is_exponent(int width = kFloat32Width) const {
    const int mantissa_bits = width == kBFloat16Width ? 7 : 23;
    return index >= mantissa_bits && index < width - 1;
  }
  [[nodiscard]] constexpr bool is_mantissa(int width = kFloat32Width) const {
    const int mantissa_bits = width == kBFloat16Width ? 7 : 23;
    return index >= 0 && index < mantissa_bits;
  }

  friend constexpr bool operator==(BitPosition, BitPosition) = default;
};

// Brain-float: upper half of a binary32 word.
struct BFloat16 {
  std::uint16_t bits = 0;

  // Truncates the lower 16 mantissa bits.
  static BFloat16 from_float(float value);
  [[nodiscard]] float to_float() const;

  friend constexpr bool operator==(BFloat16, BFloat16) = default;
};

// Where and what to corrupt. `coords` is (channel, row, col) for neurons and
// (filter, channel, row, col) for weights of convolution layer `layer`.
struct FaultDescriptor {
  FaultTarget target = FaultTarget::kNeuron;
  int layer = 0;
  std::vector<int> coords;
  BitPosition bit;
  FaultMode mode = FaultMode::kTransientFlip;

  friend bool operator==(const FaultDescriptor&, const FaultDescriptor&) = default;
};

// Per-layer tensor shapes of every injectable convolution layer.
struct LayerShapes {
  std::vector<int> neuron;  // C, H, W of the layer output
  std::vector<int> weight;  // O, C, KH, KW of the filter bank

  friend bool operator==(const LayerShapes&, const LayerShapes&) = default;
};
using ShapeCatalog = std::vector<LayerShapes>;

// Throws ArgumentError when `bit` is outside [0, 31].
std::uint32_t apply_fault_bits(std::uint32_t pattern, BitPosition bit, FaultMode mode);
float apply_fault(float value, BitPosition bit, FaultMode mode);
// Width-16 variant; throws ArgumentError when `bit` is outside [0, 15].
BFloat16 apply_fault(BFloat16 value, BitPosition bit, FaultMode mode);

ValueClass classify_value(float value);
ValueClass classify_value(BFloat16 value);

// Uniform over layers, then over coordinates of the chosen tensor, then over
// the bit positions allowed by `policy` (all 32, or exponent bits 23..30).
// Deterministic for a fixed seed. Throws ArgumentError on an empty catalog.
FaultDescriptor sample_fault(const ShapeCatalog& catalog, FaultTarget target,
                             BitPolicy policy, std::uint64_t seed,
                             FaultMode mode = FaultMode::kTransientFlip);

// Converts a rate measured with exponent-only injection into the rate expected
// under uniform 32-bit sampling: rate * 8 / 32.
double rescale_rate(double rate_exponent_only);
inline constexpr double kExponentRescaleFactor = 8.0 / 32.0;

// Product of a shape's extents.
std::size_t element_count(std::span<const int> shape);

std::string_view to_string(FaultTarget target);
std::string_view to_string(FaultMode mode);
std::string_view to_string(BitPolicy policy);
std::string_view to_string(ValueClass value_class);
FaultTarget parse_fault_target(std::string_view text);
FaultMode parse_fault_mode(std::string_view text);
BitPolicy parse_bit_policy(std::string_view text);

}  // namespace ivmod
