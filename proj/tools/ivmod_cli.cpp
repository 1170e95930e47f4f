// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0
//
// ivmod: command-line front end for fault campaigns and record scoring.
//
//   ivmod transient   --seed S --out DIR [--config FILE] [overrides]
//   ivmod permanent   --seed S --out DIR [--config FILE] [overrides]
//   ivmod ingest      --seed S --out DIR --orig FILE --corr FILE
//   ivmod simulate-pr --seed S --out DIR [--config FILE]
//   ivmod export      --seed S --out FILE [--n-images N]
//
// Exit codes: 0 success, 2 configuration error, 3 data error.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "ivmod/campaign.hpp"
#include "ivmod/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct Overrides {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::optional<unsigned> workers;
  std::optional<std::size_t> n_injections;
  std::optional<std::string> target;
  std::optional<std::string> bit_policy;
  std::optional<std::string> fault_mode;
  std::optional<std::string> image_mode;
  std::optional<double> iou_threshold;
  std::optional<int> frames;
  std::optional<std::size_t> export_masks;
  std::optional<std::string> orig;
  std::optional<std::string> corr;
  std::optional<std::size_t> n_images;
};

void add_common(CLI::App& cmd, Overrides& o, const char* out_help) {
  cmd.add_option("--config", o.config, "JSON configuration file");
  cmd.add_option("--seed", o.seed, "Base random seed")->required();
  cmd.add_option("--out", o.out, out_help)->required();
  cmd.add_option("--workers", o.workers, "Worker threads (results do not depend on it)");
  cmd.add_option("--iou-threshold", o.iou_threshold, "IoU threshold for matching");
}

void add_fault_options(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--n-injections", o.n_injections, "Number of injections");
  cmd.add_option("--target", o.target, "neuron or weight");
}

ivmod::CampaignConfig build_config(ivmod::CampaignMode mode, const Overrides& o) {
  using namespace ivmod;
  CampaignConfig cfg = o.config.empty() ? default_config(mode) : load_config(o.config, mode);
  cfg.seed = o.seed;
  auto wrap = [](auto&& parse) {
    try {
      parse();
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
  };
  if (o.workers) cfg.workers = *o.workers;
  if (o.n_injections) cfg.n_injections = *o.n_injections;
  if (o.iou_threshold) cfg.iou_threshold = *o.iou_threshold;
  if (o.target) wrap([&] { cfg.target = parse_fault_target(*o.target); });
  if (o.bit_policy) wrap([&] { cfg.bit_policy = parse_bit_policy(*o.bit_policy); });
  if (o.fault_mode) wrap([&] { cfg.fault_mode = parse_fault_mode(*o.fault_mode); });
  if (o.image_mode) {
    if (*o.image_mode == "fixed") {
      cfg.image_mode = ImageMode::kFixed;
    } else if (*o.image_mode == "per_injection") {
      cfg.image_mode = ImageMode::kPerInjection;
    } else {
      throw ConfigError("--image-mode must be fixed or per_injection");
    }
  }
  if (o.frames) cfg.sequence.frames = *o.frames;
  if (o.export_masks) cfg.export_masks = *o.export_masks;
  if (o.orig) cfg.orig_records = *o.orig;
  if (o.corr) cfg.corr_records = *o.corr;
  if (o.n_images) cfg.n_images = *o.n_images;
  cfg.validate();
  return cfg;
}

void print_rates(const ivmod::TransientReport& report) {
  std::printf("images %zu  sdc_rate %.6f  due_rate %.6f  ap50 %.4f -> %.4f\n",
              report.rows.size(), report.rates.sdc, report.rates.due, report.ap50_orig,
              report.ap50_corr);
}

int run(ivmod::CampaignMode mode, const Overrides& o) {
  using namespace ivmod;
  const CampaignConfig cfg = build_config(mode, o);
  switch (mode) {
    case CampaignMode::kTransient: {
      const auto report = run_transient(cfg);
      write_transient_report(report, cfg, o.out);
      print_rates(report);
      break;
    }
    case CampaignMode::kPermanent: {
      const auto report = run_permanent(cfg);
      write_permanent_report(report, cfg, o.out);
      for (const auto& l : report.levels) {
        std::printf("L=%.2f  fp raw %.4f rescaled %.4f  fn raw %.4f rescaled %.4f\n", l.level,
                    l.fp_raw, l.fp_rescaled, l.fn_raw, l.fn_rescaled);
      }
      break;
    }
    case CampaignMode::kIngest: {
      const auto orig = read_records(cfg.orig_records);
      const auto corr = read_records(cfg.corr_records);
      const auto report = ingest_and_score(orig, corr, cfg);
      write_transient_report(report, cfg, o.out);
      print_rates(report);
      break;
    }
    case CampaignMode::kSimulatePr: {
      const auto curves = simulate_pr(cfg);
      write_pr_report(curves, cfg, o.out);
      for (const auto& c : curves) std::printf("%-24s ap50 %.4f\n", c.name.c_str(), c.ap50);
      break;
    }
    case CampaignMode::kExport: {
      const auto records = export_records(cfg);
      write_records(std::filesystem::path(o.out), records);
      std::printf("wrote %zu records to %s\n", records.size(), o.out.c_str());
      break;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-injection campaigns and vulnerability metrics for object detectors"};
  app.require_subcommand(1);
  Overrides o;

  auto* transient = app.add_subcommand("transient", "Transient bit-flip campaign");
  add_common(*transient, o, "Report directory");
  add_fault_options(*transient, o);
  transient->add_option("--bit-policy", o.bit_policy, "all_32 or exponent_only");
  transient->add_option("--fault-mode", o.fault_mode, "transient_flip, stuck_at_0 or stuck_at_1");
  transient->add_option("--image-mode", o.image_mode, "per_injection or fixed");

  auto* permanent = app.add_subcommand("permanent", "Permanent stuck-at-1 campaign on a sequence");
  add_common(*permanent, o, "Report directory");
  add_fault_options(*permanent, o);
  permanent->add_option("--frames", o.frames, "Sequence length");
  permanent->add_option("--export-masks", o.export_masks, "Write PGM masks for the first N faults");

  auto* ingest = app.add_subcommand("ingest", "Score external detection records");
  add_common(*ingest, o, "Report directory");
  ingest->add_option("--orig", o.orig, "Fault-free records (NDJSON)");
  ingest->add_option("--corr", o.corr, "Corrupted records (NDJSON)");

  auto* simulate = app.add_subcommand("simulate-pr", "Synthetic PR-curve experiment");
  add_common(*simulate, o, "Report directory");

  auto* exporter = app.add_subcommand("export", "Write fault-free detector records");
  add_common(*exporter, o, "Output NDJSON file");
  exporter->add_option("--n-images", o.n_images, "Number of scenes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  ivmod::CampaignMode mode = ivmod::CampaignMode::kTransient;
  if (permanent->parsed()) mode = ivmod::CampaignMode::kPermanent;
  if (ingest->parsed()) mode = ivmod::CampaignMode::kIngest;
  if (simulate->parsed()) mode = ivmod::CampaignMode::kSimulatePr;
  if (exporter->parsed()) mode = ivmod::CampaignMode::kExport;

  try {
    return run(mode, o);
  } catch (const ivmod::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ivmod::ArgumentError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ivmod::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
