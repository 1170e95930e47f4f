// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include "ivmod/metrics.hpp"

#include "ivmod/errors.hpp"

namespace ivmod {
namespace {

std::optional<double> mean_of(std::span<const Detection> dets, bool use_area) {
  if (dets.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& d : dets) sum += use_area ? d.box.area() : d.confidence;
  return sum / static_cast<double>(dets.size());
}

}  // namespace

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kBenign: return "benign";
    case Verdict::kSdc: return "sdc";
    case Verdict::kDue: return "due";
  }
  return "unknown";
}

Verdict classify_image(const ImageEval& eval) {
  if (eval.inf_flag || eval.nan_flag) return Verdict::kDue;
  if (eval.orig.fp != eval.corr.fp || eval.orig.fn != eval.corr.fn) return Verdict::kSdc;
  return Verdict::kBenign;
}

Rates rates(std::span<const ImageEval> evals) {
  if (evals.empty()) throw ArgumentError("rates: empty evaluation list");
  std::size_t sdc = 0;
  std::size_t due = 0;
  for (const auto& e : evals) {
    switch (classify_image(e)) {
      case Verdict::kSdc: ++sdc; break;
      case Verdict::kDue: ++due; break;
      case Verdict::kBenign: break;
    }
  }
  const auto n = static_cast<double>(evals.size());
  return Rates{static_cast<double>(sdc) / n, static_cast<double>(due) / n};
}

SdcReport severity(const ImageEval& eval, std::span<const Detection> dets_orig,
                   std::span<const Detection> dets_corr, std::span<const Detection> gts,
                   ImageDims dims) {
  (void)gts;  // counts in `eval` already encode the ground-truth matching
  if (dims.area() == 0) throw ArgumentError("severity: zero-area image");

  SdcReport report;
  report.verdict = classify_image(eval);
  report.delta_fp = static_cast<long long>(eval.corr.fp) - static_cast<long long>(eval.orig.fp);
  if (eval.orig.tp > 0) {
    report.delta_fn_n = (static_cast<double>(eval.orig.tp) - static_cast<double>(eval.corr.tp)) /
                        static_cast<double>(eval.orig.tp);
  }
  report.negative = report.delta_fp < 0 || eval.corr.tp > eval.orig.tp;

  report.avg_conf_orig = mean_of(dets_orig, false);
  report.avg_conf_corr = mean_of(dets_corr, false);
  report.avg_size_orig = mean_of(dets_orig, true);
  report.avg_size_corr = mean_of(dets_corr, true);

  const OccupancyMask occ_orig = rasterize(dets_orig, dims.width, dims.height);
  const OccupancyMask occ_corr = rasterize(dets_corr, dims.width, dims.height);
  report.a_fp_occ = static_cast<double>(mask_diff(occ_corr, occ_orig).popcount()) /
                    static_cast<double>(dims.area());
  const std::size_t orig_area = occ_orig.popcount();
  if (orig_area > 0) {
    report.a_fn_vac = static_cast<double>(mask_diff(occ_orig, occ_corr).popcount()) /
                      static_cast<double>(orig_area);
  }
  return report;
}

BitAveraged bit_averaged(std::span<const std::pair<FaultDescriptor, SdcReport>> reports) {
  std::array<RunningMean, kBitCount> fp;
  std::array<RunningMean, kBitCount> fn;
  BitAveraged out{};
  for (const auto& [fault, report] : reports) {
    if (report.verdict != Verdict::kSdc) continue;
    const int bit = fault.bit.index;
    if (bit < 0 || bit >= kBitCount) throw ArgumentError("bit_averaged: bit index out of range");
    ++out[bit].sdc_events;
    fp[bit].add(static_cast<double>(report.delta_fp));
    fn[bit].add(report.delta_fn_n);
  }
  for (int bit = 0; bit < kBitCount; ++bit) {
    out[bit].mean_delta_fp = fp[bit].value();
    out[bit].mean_delta_fn_n = fn[bit].value();
  }
  return out;
}

BaselineOccupancy baseline_occupancy(std::span<const Detection> dets_orig,
                                     std::span<const Detection> gts, ImageDims dims) {
  if (dims.area() == 0) throw ArgumentError("baseline_occupancy: zero-area image");
  const OccupancyMask occ_dets = rasterize(dets_orig, dims.width, dims.height);
  const OccupancyMask occ_gts = rasterize(gts, dims.width, dims.height);
  BaselineOccupancy out;
  out.a_fp_occ_orig = static_cast<double>(mask_diff(occ_dets, occ_gts).popcount()) /
                      static_cast<double>(dims.area());
  const std::size_t det_area = occ_dets.popcount();
  if (det_area > 0) {
    out.a_fn_vac_orig = static_cast<double>(mask_diff(occ_gts, occ_dets).popcount()) /
                        static_cast<double>(det_area);
  }
  return out;
}

SeveritySummary summarize_sdc(std::span<const SdcReport> reports) {
  RunningMean delta_fp, delta_fn_n, conf_orig, conf_corr, size_orig, size_corr, fp_occ, fn_vac;
  SeveritySummary out;
  for (const auto& r : reports) {
    if (r.verdict != Verdict::kSdc) continue;
    ++out.sdc_events;
    delta_fp.add(static_cast<double>(r.delta_fp));
    delta_fn_n.add(r.delta_fn_n);
    conf_orig.add(r.avg_conf_orig);
    conf_corr.add(r.avg_conf_corr);
    size_orig.add(r.avg_size_orig);
    size_corr.add(r.avg_size_corr);
    fp_occ.add(r.a_fp_occ);
    fn_vac.add(r.a_fn_vac);
  }
  out.delta_fp = delta_fp.value();
  out.delta_fn_n = delta_fn_n.value();
  out.avg_conf_orig = conf_orig.value();
  out.avg_conf_corr = conf_corr.value();
  out.avg_size_orig = size_orig.value();
  out.avg_size_corr = size_corr.value();
  out.a_fp_occ = fp_occ.value();
  out.a_fn_vac = fn_vac.value();
  return out;
}

}  // namespace ivmod
