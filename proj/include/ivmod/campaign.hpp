// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0
//
// Campaign orchestration: configuration, transient and permanent fault
// campaigns on the toy detector, scoring of external detection records, the
// synthetic PR experiment, and the report writers behind the CLI.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ivmod/ap_eval.hpp"
#include "ivmod/fault_model.hpp"
#include "ivmod/matching.hpp"
#include "ivmod/metrics.hpp"
#include "ivmod/persistence.hpp"
#include "ivmod/records.hpp"
#include "ivmod/toy_detector.hpp"

namespace ivmod {

enum class CampaignMode { kTransient, kPermanent, kIngest, kSimulatePr, kExport };

std::string_view to_string(CampaignMode mode);
CampaignMode parse_campaign_mode(std::string_view text);

enum class ImageMode { kPerInjection, kFixed };

struct CampaignConfig {
  CampaignMode mode = CampaignMode::kTransient;
  std::optional<std::uint64_t> seed;
  std::size_t n_injections = 200;
  FaultTarget target = FaultTarget::kNeuron;
  BitPolicy bit_policy = BitPolicy::kAll32;
  FaultMode fault_mode = FaultMode::kTransientFlip;
  double iou_threshold = kDefaultIouThreshold;
  CategoryPolicy category_policy = CategoryPolicy::strict();
  ImageMode image_mode = ImageMode::kPerInjection;
  SceneSpec scene;
  // Permanent campaigns.
  SequenceSpec sequence;
  TrackerConfig tracker;  // coasting is forced on for FP and off for FN blobs
  std::vector<double> severity_levels = {0.0, 0.05, 0.10, 0.15};
  std::size_t export_masks = 0;  // faults whose persistent masks become PGMs
  // Ingest.
  std::filesystem::path orig_records;
  std::filesystem::path corr_records;
  // Synthetic PR experiment.
  SyntheticSetConfig synthetic;
  std::vector<Perturbation> perturbations = {AddFps{500, 0.0, 0.2}, AddFps{100, 0.9, 1.0},
                                             RemoveTps{20}};
  // Export.
  std::size_t n_images = 20;
  // Execution only; never affects results.
  unsigned workers = 1;

  // Throws ConfigError on missing seed or inconsistent fields.
  void validate() const;
};

// Parses a JSON config document. The mode comes from the caller (the CLI
// subcommand); a "mode" key, when present, must agree. Unknown keys are
// rejected. Throws ConfigError.
CampaignConfig parse_config(std::string_view json_text, CampaignMode mode);
CampaignConfig load_config(const std::filesystem::path& path, CampaignMode mode);
// Default configuration for `mode` (seed unset).
CampaignConfig default_config(CampaignMode mode);

// Independent stream seed for work item `index` of `stream`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

struct InjectionRow {
  std::optional<std::size_t> injection_id;  // absent for ingested records
  std::optional<FaultDescriptor> fault;
  std::string image_id;
  ImageEval eval;
  SdcReport report;
};

struct TransientReport {
  std::vector<InjectionRow> rows;
  Rates rates;
  SeveritySummary severity;
  BitAveraged bit_averaged{};
  double ap50_orig = 0.0;
  double ap50_corr = 0.0;
  double map_orig = 0.0;
  double map_corr = 0.0;
  std::size_t negative_events = 0;
};

TransientReport run_transient(const CampaignConfig& cfg);

struct PermanentFaultResult {
  std::size_t fault_id = 0;
  FaultDescriptor fault;
  bool due = false;
  std::vector<std::pair<double, bool>> fp_levels;
  std::vector<std::pair<double, bool>> fn_levels;
  std::vector<std::optional<double>> fp_series;
  std::vector<std::optional<double>> fn_series;
  std::optional<double> fp_mean;
  std::optional<double> fn_mean;
  PersistenceVerdict fp_verdict;
  PersistenceVerdict fn_verdict;
};

struct LevelRate {
  double level = 0.0;
  double fp_raw = 0.0;
  double fp_rescaled = 0.0;
  double fn_raw = 0.0;
  double fn_rescaled = 0.0;
};

struct BitOccupancy {
  int bit = 0;
  std::size_t faults = 0;
  std::optional<double> fp_occ;
  std::optional<double> fn_vac;
};

struct PermanentReport {
  std::vector<PermanentFaultResult> faults;
  std::vector<LevelRate> levels;
  double due_raw = 0.0;
  double due_rescaled = 0.0;
  std::vector<BitOccupancy> by_bit;  // exponent bits 23..30
  std::optional<double> baseline_fp_occ;
  std::optional<double> baseline_fn_vac;
};

// Requires the exponent_only bit policy; every fault is stuck-at-1.
PermanentReport run_permanent(const CampaignConfig& cfg);

// Scores aligned orig/corr record files. Ground truth comes from the orig
// records. Throws DataError on misaligned image ids or mismatched sizes.
TransientReport ingest_and_score(const std::vector<DetectionRecord>& orig,
                                 const std::vector<DetectionRecord>& corr,
                                 const CampaignConfig& cfg);

struct PrExperimentCurve {
  std::string name;
  SyntheticSet set;
  PrCurve curve;
  double ap50 = 0.0;
};

// Baseline plus one curve per configured perturbation.
std::vector<PrExperimentCurve> simulate_pr(const CampaignConfig& cfg);

// Fault-free detector outputs with ground truth for `cfg.n_images` scenes.
std::vector<DetectionRecord> export_records(const CampaignConfig& cfg);

// Writers. Each creates `dir` if needed and returns the files written.
std::vector<std::filesystem::path> write_transient_report(const TransientReport& report,
                                                          const CampaignConfig& cfg,
                                                          const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_permanent_report(const PermanentReport& report,
                                                          const CampaignConfig& cfg,
                                                          const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_pr_report(const std::vector<PrExperimentCurve>& curves,
                                                   const CampaignConfig& cfg,
                                                   const std::filesystem::path& dir);

// Fixed CSV header of the per-injection table.
std::string_view injections_csv_header();

}  // namespace ivmod
