// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0
//
// Image-wise vulnerability metrics: SDC/DUE verdicts and rates, severity
// features of one corrupted inference, bit-averaged aggregation and the
// baseline occupancy of a fault-free detector.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ivmod/fault_model.hpp"
#include "ivmod/geometry.hpp"
#include "ivmod/matching.hpp"

namespace ivmod {

enum class Verdict { kBenign, kSdc, kDue };

std::string_view to_string(Verdict verdict);

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  static Counts from(const MatchOutcome& outcome) { return {outcome.tp, outcome.fp, outcome.fn}; }
  friend bool operator==(const Counts&, const Counts&) = default;
};

struct ImageEval {
  std::string image_id;
  Counts orig;
  Counts corr;
  bool inf_flag = false;  // symptoms of the corrupted inference
  bool nan_flag = false;
};

// DUE on any NaN/Inf symptom, else SDC when FP or FN counts changed.
Verdict classify_image(const ImageEval& eval);

struct Rates {
  double sdc = 0.0;
  double due = 0.0;
  [[nodiscard]] double benign() const { return 1.0 - sdc - due; }
};

// Throws ArgumentError on an empty list.
Rates rates(std::span<const ImageEval> evals);

struct SdcReport {
  Verdict verdict = Verdict::kBenign;
  long long delta_fp = 0;
  std::optional<double> delta_fn_n;  // absent when tp_orig is 0
  std::optional<double> avg_conf_orig;  // absent without detections
  std::optional<double> avg_conf_corr;
  std::optional<double> avg_size_orig;  // px^2
  std::optional<double> avg_size_corr;
  double a_fp_occ = 0.0;
  std::optional<double> a_fn_vac;  // absent when orig detections cover nothing
  // Set when delta_fp < 0 or the corrupted run gained TPs.
  bool negative = false;
};

// Throws ArgumentError when the image area is zero.
SdcReport severity(const ImageEval& eval, std::span<const Detection> dets_orig,
                   std::span<const Detection> dets_corr, std::span<const Detection> gts,
                   ImageDims dims);

// Mean of optional samples; absent samples are skipped.
class RunningMean {
 public:
  void add(std::optional<double> sample) {
    if (!sample) return;
    sum_ += *sample;
    ++n_;
  }
  [[nodiscard]] std::size_t count() const { return n_; }
  [[nodiscard]] std::optional<double> value() const {
    if (n_ == 0) return std::nullopt;
    return sum_ / static_cast<double>(n_);
  }

 private:
  double sum_ = 0.0;
  std::size_t n_ = 0;
};

inline constexpr int kBitCount = 32;

struct BitAverage {
  std::size_t sdc_events = 0;
  std::optional<double> mean_delta_fp;
  std::optional<double> mean_delta_fn_n;
};

// Index = bit position. Only SDC-verdict reports contribute.
using BitAveraged = std::array<BitAverage, kBitCount>;

BitAveraged bit_averaged(std::span<const std::pair<FaultDescriptor, SdcReport>> reports);

struct BaselineOccupancy {
  double a_fp_occ_orig = 0.0;
  std::optional<double> a_fn_vac_orig;
};

BaselineOccupancy baseline_occupancy(std::span<const Detection> dets_orig,
                                     std::span<const Detection> gts, ImageDims dims);

// Per-feature means over SDC events, laid out as one severity table row.
// Sizes stay in px^2; divide by 1e3 for the customary table units.
struct SeveritySummary {
  std::size_t sdc_events = 0;
  std::optional<double> delta_fp;
  std::optional<double> delta_fn_n;
  std::optional<double> avg_conf_orig;
  std::optional<double> avg_conf_corr;
  std::optional<double> avg_size_orig;
  std::optional<double> avg_size_corr;
  std::optional<double> a_fp_occ;
  std::optional<double> a_fn_vac;
};

SeveritySummary summarize_sdc(std::span<const SdcReport> reports);

}  // namespace ivmod
