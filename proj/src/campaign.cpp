// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include "ivmod/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "ivmod/errors.hpp"

namespace ivmod {
namespace {

enum Stream : std::uint64_t { kSceneStream = 1, kFaultStream = 2, kSequenceStream = 3,
                              kSyntheticStream = 4, kPerturbStream = 5 };

// Runs body(i) for i in [0, count) on `workers` threads. Every index is
// written to its own slot, so the caller's reduction order never depends on
// scheduling. The first exception is rethrown after all threads join.
template <typename Body>
void parallel_for(std::size_t count, unsigned workers, Body body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

InjectionRow score_image(const std::vector<Detection>& dets_orig,
                         const std::vector<Detection>& dets_corr,
                         const std::vector<Detection>& gts, ImageDims dims, bool nan, bool inf,
                         const CampaignConfig& cfg) {
  InjectionRow row;
  row.eval.orig = Counts::from(assign(dets_orig, gts, cfg.iou_threshold, cfg.category_policy));
  row.eval.corr = Counts::from(assign(dets_corr, gts, cfg.iou_threshold, cfg.category_policy));
  row.eval.nan_flag = nan;
  row.eval.inf_flag = inf;
  row.report = severity(row.eval, dets_orig, dets_corr, gts, dims);
  return row;
}

// Fills rates, summaries and AP figures from rows plus the per-image
// detections they were computed from.
void reduce(TransientReport& report, const DetectionsByImage& orig,
            const DetectionsByImage& corr, const DetectionsByImage& gts) {
  std::vector<ImageEval> evals;
  std::vector<SdcReport> sdc_reports;
  std::vector<std::pair<FaultDescriptor, SdcReport>> by_fault;
  evals.reserve(report.rows.size());
  for (const auto& row : report.rows) {
    evals.push_back(row.eval);
    sdc_reports.push_back(row.report);
    if (row.fault) by_fault.emplace_back(*row.fault, row.report);
    if (row.report.verdict == Verdict::kSdc && row.report.negative) ++report.negative_events;
  }
  if (!evals.empty()) report.rates = rates(evals);
  report.severity = summarize_sdc(sdc_reports);
  report.bit_averaged = bit_averaged(by_fault);
  report.ap50_orig = average_precision(orig, gts, 0.5).mean;
  report.ap50_corr = average_precision(corr, gts, 0.5).mean;
  report.map_orig = mean_average_precision(orig, gts);
  report.map_corr = mean_average_precision(corr, gts);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  // splitmix64 finalizer over a combination of the three inputs.
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (stream + 1) + 0xBF58476D1CE4E5B9ull * index;
  for (int round = 0; round < 2; ++round) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
  }
  return z;
}

TransientReport run_transient(const CampaignConfig& cfg) {
  cfg.validate();
  const std::uint64_t seed = *cfg.seed;
  const DetectorModel model = DetectorModel::analytic(cfg.scene.width, cfg.scene.height);
  const ShapeCatalog catalog = model.shape_catalog();
  const ImageDims dims{cfg.scene.width, cfg.scene.height};

  const std::size_t n = cfg.n_injections;
  TransientReport report;
  report.rows.resize(n);
  DetectionsByImage orig(n), corr(n), gts(n);

  std::optional<Scene> fixed_scene;
  std::optional<std::vector<Detection>> fixed_orig;
  if (cfg.image_mode == ImageMode::kFixed) {
    fixed_scene = generate_scene(cfg.scene, derive_seed(seed, kSceneStream, 0));
    fixed_orig = infer(model, *fixed_scene).detections;
  }

  parallel_for(n, cfg.workers, [&](std::size_t i) {
    const std::uint64_t scene_seed = derive_seed(seed, kSceneStream, i);
    const Scene scene = fixed_scene ? *fixed_scene : generate_scene(cfg.scene, scene_seed);
    const FaultDescriptor fault = sample_fault(catalog, cfg.target, cfg.bit_policy,
                                               derive_seed(seed, kFaultStream, i), cfg.fault_mode);
    std::vector<Detection> dets_orig = fixed_orig ? *fixed_orig : infer(model, scene).detections;
    InferenceTrace trace = infer(model, scene, fault);

    gts[i] = scene.ground_truth();
    InjectionRow row = score_image(dets_orig, trace.detections, gts[i], dims, trace.nan_seen,
                                   trace.inf_seen, cfg);
    row.injection_id = i;
    row.fault = fault;
    row.image_id = fixed_scene ? "scene-fixed" : "scene-" + std::to_string(i);
    row.eval.image_id = row.image_id;
    report.rows[i] = std::move(row);
    orig[i] = std::move(dets_orig);
    corr[i] = std::move(trace.detections);
  });

  reduce(report, orig, corr, gts);
  return report;
}

PermanentReport run_permanent(const CampaignConfig& cfg) {
  cfg.validate();
  const std::uint64_t seed = *cfg.seed;
  const DetectorModel model = DetectorModel::analytic(cfg.sequence.width, cfg.sequence.height);
  const ShapeCatalog catalog = model.shape_catalog();
  const std::vector<Scene> frames =
      generate_sequence(cfg.sequence, derive_seed(seed, kSequenceStream, 0));
  const int width = cfg.sequence.width;
  const int height = cfg.sequence.height;
  const ImageDims dims{width, height};

  // Fault-free reference run.
  std::vector<OccupancyMask> occ_orig;
  std::vector<std::size_t> orig_area;
  RunningMean baseline_fp;
  RunningMean baseline_fn;
  for (const Scene& frame : frames) {
    const auto dets = infer(model, frame).detections;
    occ_orig.push_back(rasterize(dets, width, height));
    orig_area.push_back(occ_orig.back().popcount());
    const auto gt = frame.ground_truth();
    const BaselineOccupancy base = baseline_occupancy(dets, gt, dims);
    baseline_fp.add(base.a_fp_occ_orig);
    baseline_fn.add(base.a_fn_vac_orig);
  }

  TrackerConfig fp_cfg = cfg.tracker;
  fp_cfg.coasting = true;
  TrackerConfig fn_cfg = cfg.tracker;
  fn_cfg.coasting = false;
  const OccupancyReference fp_ref{BlobKind::kFalsePositive, dims.area(), {}};
  const OccupancyReference fn_ref{BlobKind::kFalseNegative, dims.area(), orig_area};

  PermanentReport report;
  report.faults.resize(cfg.n_injections);
  parallel_for(cfg.n_injections, cfg.workers, [&](std::size_t i) {
    PermanentFaultResult result;
    result.fault_id = i;
    result.fault = sample_fault(catalog, cfg.target, BitPolicy::kExponentOnly,
                                derive_seed(seed, kFaultStream, i), FaultMode::kStuckAt1);
    std::optional<DetectorModel> faulty;
    if (result.fault.target == FaultTarget::kWeight) faulty = model.with_fault(result.fault);

    std::vector<OccupancyMask> fp_blobs;
    std::vector<OccupancyMask> fn_blobs;
    fp_blobs.reserve(frames.size());
    fn_blobs.reserve(frames.size());
    for (std::size_t t = 0; t < frames.size(); ++t) {
      const InferenceTrace trace = faulty ? infer(*faulty, frames[t])
                                          : infer(model, frames[t], result.fault);
      result.due = result.due || trace.nan_seen || trace.inf_seen;
      const OccupancyMask occ = rasterize(trace.detections, width, height);
      fp_blobs.push_back(mask_diff(occ, occ_orig[t]));
      fn_blobs.push_back(mask_diff(occ_orig[t], occ));
    }
    result.fp_verdict = track(fp_blobs, fp_cfg);
    result.fn_verdict = track(fn_blobs, fn_cfg);
    result.fp_series = occupancy_series(result.fp_verdict, fp_ref);
    result.fn_series = occupancy_series(result.fn_verdict, fn_ref);
    result.fp_levels = sdc_at_severity(result.fp_series, cfg.severity_levels);
    result.fn_levels = sdc_at_severity(result.fn_series, cfg.severity_levels);
    RunningMean fp_mean;
    RunningMean fn_mean;
    for (const auto& v : result.fp_series) fp_mean.add(v);
    for (const auto& v : result.fn_series) fn_mean.add(v);
    result.fp_mean = fp_mean.value();
    result.fn_mean = fn_mean.value();
    if (i >= cfg.export_masks) {
      result.fp_verdict = {};
      result.fn_verdict = {};
    }
    report.faults[i] = std::move(result);
  });

  const auto total = static_cast<double>(report.faults.size());
  for (std::size_t k = 0; k < cfg.severity_levels.size(); ++k) {
    std::size_t fp_hits = 0;
    std::size_t fn_hits = 0;
    for (const auto& f : report.faults) {
      fp_hits += f.fp_levels[k].second ? 1 : 0;
      fn_hits += f.fn_levels[k].second ? 1 : 0;
    }
    LevelRate rate;
    rate.level = cfg.severity_levels[k];
    rate.fp_raw = static_cast<double>(fp_hits) / total;
    rate.fn_raw = static_cast<double>(fn_hits) / total;
    rate.fp_rescaled = rescale_rate(rate.fp_raw);
    rate.fn_rescaled = rescale_rate(rate.fn_raw);
    report.levels.push_back(rate);
  }
  const auto due_count = std::count_if(report.faults.begin(), report.faults.end(),
                                       [](const PermanentFaultResult& f) { return f.due; });
  report.due_raw = static_cast<double>(due_count) / total;
  report.due_rescaled = rescale_rate(report.due_raw);

  for (int bit = 23; bit <= 30; ++bit) {
    BitOccupancy entry;
    entry.bit = bit;
    RunningMean fp;
    RunningMean fn;
    for (const auto& f : report.faults) {
      if (f.fault.bit.index != bit) continue;
      ++entry.faults;
      fp.add(f.fp_mean);
      fn.add(f.fn_mean);
    }
    entry.fp_occ = fp.value();
    entry.fn_vac = fn.value();
    report.by_bit.push_back(entry);
  }
  report.baseline_fp_occ = baseline_fp.value();
  report.baseline_fn_vac = baseline_fn.value();
  return report;
}

TransientReport ingest_and_score(const std::vector<DetectionRecord>& orig,
                                 const std::vector<DetectionRecord>& corr,
                                 const CampaignConfig& cfg) {
  std::map<std::string, std::size_t> corr_index;
  std::vector<std::string> duplicates;
  for (std::size_t k = 0; k < corr.size(); ++k) {
    if (!corr_index.emplace(corr[k].image_id, k).second) duplicates.push_back(corr[k].image_id);
  }
  std::set<std::string> orig_ids;
  std::vector<std::string> missing_in_corr;
  for (const auto& rec : orig) {
    if (!orig_ids.insert(rec.image_id).second) duplicates.push_back(rec.image_id);
    if (!corr_index.count(rec.image_id)) missing_in_corr.push_back(rec.image_id);
  }
  std::vector<std::string> missing_in_orig;
  for (const auto& rec : corr) {
    if (!orig_ids.count(rec.image_id)) missing_in_orig.push_back(rec.image_id);
  }
  auto join = [](const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
    return out;
  };
  if (!duplicates.empty() || !missing_in_corr.empty() || !missing_in_orig.empty()) {
    std::string message = "record files do not align one-to-one:";
    if (!duplicates.empty()) message += " duplicate ids [" + join(duplicates) + "];";
    if (!missing_in_corr.empty()) message += " missing from corrupted [" + join(missing_in_corr) + "];";
    if (!missing_in_orig.empty()) message += " missing from original [" + join(missing_in_orig) + "];";
    throw DataError(message);
  }
  if (orig.empty()) throw DataError("record files are empty");

  TransientReport report;
  DetectionsByImage orig_dets, corr_dets, gts;
  for (const auto& o : orig) {
    const DetectionRecord& c = corr[corr_index.at(o.image_id)];
    if (c.width != o.width || c.height != o.height) {
      throw DataError("image " + o.image_id + " has different sizes in the two files");
    }
    InjectionRow row = score_image(o.detections, c.detections, o.ground_truth,
                                   ImageDims{o.width, o.height}, c.nan, c.inf, cfg);
    row.image_id = o.image_id;
    row.eval.image_id = o.image_id;
    report.rows.push_back(std::move(row));
    orig_dets.push_back(o.detections);
    corr_dets.push_back(c.detections);
    gts.push_back(o.ground_truth);
  }
  reduce(report, orig_dets, corr_dets, gts);
  return report;
}

std::vector<PrExperimentCurve> simulate_pr(const CampaignConfig& cfg) {
  cfg.validate();
  SyntheticSetConfig synthetic = cfg.synthetic;
  synthetic.seed = derive_seed(*cfg.seed, kSyntheticStream, 0);
  const SyntheticSet base = generate_synthetic_set(synthetic);

  std::vector<PrExperimentCurve> curves;
  auto add = [&](std::string name, SyntheticSet set) {
    PrExperimentCurve c;
    c.name = std::move(name);
    c.curve = pr_curve(set.outcomes, set.n_gt);
    c.ap50 = area_under(c.curve, ApInterpolation::kCoco101);
    c.set = std::move(set);
    curves.push_back(std::move(c));
  };
  add("baseline", base);
  for (std::size_t k = 0; k < cfg.perturbations.size(); ++k) {
    const Perturbation& p = cfg.perturbations[k];
    std::string name;
    if (const auto* a = std::get_if<AddFps>(&p)) {
      name = "add_fps_" + std::to_string(a->count);
    } else {
      name = "remove_tps_" + std::to_string(std::get<RemoveTps>(p).count);
    }
    name += "_" + std::to_string(k);
    try {
      add(name, perturb_set(base, p, derive_seed(*cfg.seed, kPerturbStream, k)));
    } catch (const ArgumentError& e) {
      throw ConfigError(std::string("perturbation ") + std::to_string(k) + ": " + e.what());
    }
  }
  return curves;
}

std::vector<DetectionRecord> export_records(const CampaignConfig& cfg) {
  cfg.validate();
  const DetectorModel model = DetectorModel::analytic(cfg.scene.width, cfg.scene.height);
  std::vector<DetectionRecord> records(cfg.n_images);
  parallel_for(cfg.n_images, cfg.workers, [&](std::size_t i) {
    const Scene scene = generate_scene(cfg.scene, derive_seed(*cfg.seed, kSceneStream, i));
    const InferenceTrace trace = infer(model, scene);
    DetectionRecord& rec = records[i];
    rec.image_id = "scene-" + std::to_string(i);
    rec.width = scene.width;
    rec.height = scene.height;
    rec.detections = trace.detections;
    rec.ground_truth = scene.ground_truth();
    rec.nan = trace.nan_seen;
    rec.inf = trace.inf_seen;
  });
  return records;
}

}  // namespace ivmod
