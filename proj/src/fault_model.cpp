// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include "ivmod/fault_model.hpp"

#include <bit>
#include <functional>
#include <random>
#include <string>

#include "ivmod/errors.hpp"

namespace ivmod {
namespace {

constexpr std::uint32_t kF32ExponentMask = 0x7F800000u;
constexpr std::uint32_t kF32MantissaMask = 0x007FFFFFu;
constexpr std::uint16_t kBF16ExponentMask = 0x7F80u;
constexpr std::uint16_t kBF16MantissaMask = 0x007Fu;

template <typename Word>
Word corrupt(Word pattern, int index, FaultMode mode) {
  const Word mask = static_cast<Word>(Word{1} << index);
  switch (mode) {
    case FaultMode::kTransientFlip:
      return static_cast<Word>(pattern ^ mask);
    case FaultMode::kStuckAt0:
      return static_cast<Word>(pattern & static_cast<Word>(~mask));
    case FaultMode::kStuckAt1:
      return static_cast<Word>(pattern | mask);
  }
  return pattern;
}

void check_bit(BitPosition bit, int width) {
  if (bit.index < 0 || bit.index >= width) {
    throw ArgumentError("bit index " + std::to_string(bit.index) + " outside [0, " +
                        std::to_string(width - 1) + "]");
  }
}

}  // namespace

BFloat16 BFloat16::from_float(float value) {
  return BFloat16{static_cast<std::uint16_t>(std::bit_cast<std::uint32_t>(value) >> 16)};
}

float BFloat16::to_float() const {
  return std::bit_cast<float>(static_cast<std::uint32_t>(bits) << 16);
}

std::uint32_t apply_fault_bits(std::uint32_t pattern, BitPosition bit, FaultMode mode) {
  check_bit(bit, BitPosition::kFloat32Width);
  return corrupt(pattern, bit.index, mode);
}

float apply_fault(float value, BitPosition bit, FaultMode mode) {
  return std::bit_cast<float>(apply_fault_bits(std::bit_cast<std::uint32_t>(value), bit, mode));
}

BFloat16 apply_fault(BFloat16 value, BitPosition bit, FaultMode mode) {
  check_bit(bit, BitPosition::kBFloat16Width);
  return BFloat16{corrupt(value.bits, bit.index, mode)};
}

ValueClass classify_value(float value) {
  const auto pattern = std::bit_cast<std::uint32_t>(value);
  if ((pattern & kF32ExponentMask) != kF32ExponentMask) return ValueClass::kRegular;
  return (pattern & kF32MantissaMask) == 0 ? ValueClass::kInf : ValueClass::kNaN;
}

ValueClass classify_value(BFloat16 value) {
  if ((value.bits & kBF16ExponentMask) != kBF16ExponentMask) return ValueClass::kRegular;
  return (value.bits & kBF16MantissaMask) == 0 ? ValueClass::kInf : ValueClass::kNaN;
}

std::size_t element_count(std::span<const int> shape) {
  std::size_t count = 1;
  for (int extent : shape) count *= static_cast<std::size_t>(extent);
  return count;
}

FaultDescriptor sample_fault(const ShapeCatalog& catalog, FaultTarget target,
                             BitPolicy policy, std::uint64_t seed, FaultMode mode) {
  if (catalog.empty()) throw ArgumentError("sample_fault: empty shape catalog");
  std::mt19937_64 rng(seed);

  FaultDescriptor fault;
  fault.target = target;
  fault.mode = mode;
  fault.layer = std::uniform_int_distribution<int>(0, static_cast<int>(catalog.size()) - 1)(rng);

  const auto& shape = target == FaultTarget::kNeuron ? catalog[fault.layer].neuron
                                                     : catalog[fault.layer].weight;
  if (shape.empty() || element_count(shape) == 0) {
    throw ArgumentError("sample_fault: layer " + std::to_string(fault.layer) +
                        " has an empty tensor");
  }
  fault.coords.reserve(shape.size());
  for (int extent : shape) {
    fault.coords.push_back(std::uniform_int_distribution<int>(0, extent - 1)(rng));
  }

  if (policy == BitPolicy::kAll32) {
    fault.bit.index = std::uniform_int_distribution<int>(0, 31)(rng);
  } else {
    fault.bit.index = std::uniform_int_distribution<int>(23, 30)(rng);
  }
  return fault;
}

double rescale_rate(double rate_exponent_only) {
  if (!(rate_exponent_only >= 0.0 && rate_exponent_only <= 1.0)) {
    throw ArgumentError("rescale_rate: rate outside [0, 1]");
  }
  return rate_exponent_only * kExponentRescaleFactor;
}

std::string_view to_string(FaultTarget target) {
  return target == FaultTarget::kNeuron ? "neuron" : "weight";
}

std::string_view to_string(FaultMode mode) {
  switch (mode) {
    case FaultMode::kTransientFlip: return "transient_flip";
    case FaultMode::kStuckAt0: return "stuck_at_0";
    case FaultMode::kStuckAt1: return "stuck_at_1";
  }
  return "unknown";
}

std::string_view to_string(BitPolicy policy) {
  return policy == BitPolicy::kAll32 ? "all_32" : "exponent_only";
}

std::string_view to_string(ValueClass value_class) {
  switch (value_class) {
    case ValueClass::kRegular: return "regular";
    case ValueClass::kInf: return "inf";
    case ValueClass::kNaN: return "nan";
  }
  return "unknown";
}

FaultTarget parse_fault_target(std::string_view text) {
  if (text == "neuron") return FaultTarget::kNeuron;
  if (text == "weight") return FaultTarget::kWeight;
  throw ArgumentError("unknown fault target '" + std::string(text) + "'");
}

FaultMode parse_fault_mode(std::string_view text) {
  if (text == "transient_flip") return FaultMode::kTransientFlip;
  if (text == "stuck_at_0") return FaultMode::kStuckAt0;
  if (text == "stuck_at_1") return FaultMode::kStuckAt1;
  throw ArgumentError("unknown fault mode '" + std::string(text) + "'");
}

BitPolicy parse_bit_policy(std::string_view text) {
  if (text == "all_32") return BitPolicy::kAll32;
  if (text == "exponent_only") return BitPolicy::kExponentOnly;
  throw ArgumentError("unknown bit policy '" + std::string(text) + "'");
}

}  // namespace ivmod
