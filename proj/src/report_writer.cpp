// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ivmod/campaign.hpp"
#include "ivmod/errors.hpp"

namespace ivmod {
namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Shortest representation that round-trips.
std::string num(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string num(const std::optional<double>& value) { return value ? num(*value) : std::string(); }

ojson opt(const std::optional<double>& value) { return value ? ojson(*value) : ojson(nullptr); }

std::optional<double> kilo(const std::optional<double>& value) {
  if (!value) return std::nullopt;
  return *value / 1e3;
}

std::string coords_text(const std::vector<int>& coords) {
  std::string out;
  for (std::size_t k = 0; k < coords.size(); ++k) {
    if (k) out += ':';
    out += std::to_string(coords[k]);
  }
  return out;
}

std::string policy_name(const CategoryPolicy& policy) {
  switch (policy.mode()) {
    case CategoryMode::kStrict: return "strict";
    case CategoryMode::kClusters: return "clusters";
    case CategoryMode::kNone: return "none";
  }
  return "unknown";
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& content) {
  const fs::path path = dir / name;
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot open " + path.string() + " for writing");
  file << content;
  if (!file) throw DataError("failed writing " + path.string());
  return path;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
}

ojson config_echo(const CampaignConfig& cfg) {
  ojson c;
  c["mode"] = std::string(to_string(cfg.mode));
  c["seed"] = *cfg.seed;
  switch (cfg.mode) {
    case CampaignMode::kTransient:
    case CampaignMode::kPermanent:
      c["n_injections"] = cfg.n_injections;
      c["target"] = std::string(to_string(cfg.target));
      c["bit_policy"] = std::string(to_string(cfg.bit_policy));
      c["fault_mode"] = std::string(to_string(cfg.fault_mode));
      break;
    default:
      break;
  }
  c["iou_threshold"] = cfg.iou_threshold;
  c["category_policy"] = policy_name(cfg.category_policy);
  return c;
}

}  // namespace

std::string_view injections_csv_header() {
  return "injection_id,target,layer,coords,bit,mode,image_id,verdict,delta_fp,delta_fn_n,"
         "avg_conf_orig,avg_conf_corr,avg_size_orig,avg_size_corr,a_fp_occ,a_fn_vac";
}

std::vector<fs::path> write_transient_report(const TransientReport& report,
                                             const CampaignConfig& cfg, const fs::path& dir) {
  make_dir(dir);
  std::vector<fs::path> written;

  ojson summary;
  summary["config"] = config_echo(cfg);
  summary["images"] = report.rows.size();
  ojson rates;
  rates["sdc"] = report.rates.sdc;
  rates["due"] = report.rates.due;
  rates["benign"] = report.rates.benign();
  if (cfg.mode == CampaignMode::kTransient && cfg.bit_policy == BitPolicy::kExponentOnly) {
    rates["sdc_rescaled"] = rescale_rate(report.rates.sdc);
    rates["due_rescaled"] = rescale_rate(report.rates.due);
  }
  summary["rates"] = rates;
  const SeveritySummary& s = report.severity;
  summary["severity"] = {
      {"sdc_events", s.sdc_events},
      {"delta_fp", opt(s.delta_fp)},
      {"delta_fn_n", opt(s.delta_fn_n)},
      {"avg_conf_orig", opt(s.avg_conf_orig)},
      {"avg_conf_corr", opt(s.avg_conf_corr)},
      {"avg_size_orig_kpx", opt(kilo(s.avg_size_orig))},
      {"avg_size_corr_kpx", opt(kilo(s.avg_size_corr))},
      {"a_fp_occ", opt(s.a_fp_occ)},
      {"a_fn_vac", opt(s.a_fn_vac)},
      {"negative_events", report.negative_events},
  };
  summary["ap"] = {{"ap50_orig", report.ap50_orig},
                   {"ap50_corr", report.ap50_corr},
                   {"map_orig", report.map_orig},
                   {"map_corr", report.map_corr}};
  written.push_back(write_file(dir, "summary.json", summary.dump(2) + "\n"));

  std::ostringstream csv;
  csv << injections_csv_header() << '\n';
  for (const auto& row : report.rows) {
    if (row.injection_id) csv << *row.injection_id;
    csv << ',';
    if (row.fault) {
      csv << to_string(row.fault->target) << ',' << row.fault->layer << ','
          << coords_text(row.fault->coords) << ',' << row.fault->bit.index << ','
          << to_string(row.fault->mode);
    } else {
      csv << ",,,,";
    }
    const SdcReport& r = row.report;
    csv << ',' << row.image_id << ',' << to_string(r.verdict) << ',' << r.delta_fp << ','
        << num(r.delta_fn_n) << ',' << num(r.avg_conf_orig) << ',' << num(r.avg_conf_corr) << ','
        << num(r.avg_size_orig) << ',' << num(r.avg_size_corr) << ',' << num(r.a_fp_occ) << ','
        << num(r.a_fn_vac) << '\n';
  }
  written.push_back(write_file(dir, "injections.csv", csv.str()));

  if (cfg.mode == CampaignMode::kTransient) {
    std::ostringstream bits;
    bits << "bit,sdc_events,mean_delta_fp,mean_delta_fn_n\n";
    for (int bit = 0; bit < kBitCount; ++bit) {
      const BitAverage& b = report.bit_averaged[bit];
      bits << bit << ',' << b.sdc_events << ',' << num(b.mean_delta_fp) << ','
           << num(b.mean_delta_fn_n) << '\n';
    }
    written.push_back(write_file(dir, "bit_averaged.csv", bits.str()));
  }
  return written;
}

std::vector<fs::path> write_permanent_report(const PermanentReport& report,
                                             const CampaignConfig& cfg, const fs::path& dir) {
  make_dir(dir);
  std::vector<fs::path> written;

  ojson summary;
  summary["config"] = config_echo(cfg);
  summary["config"]["frames"] = cfg.sequence.frames;
  summary["config"]["tracker"] = {{"m", cfg.tracker.m},
                                  {"n", cfg.tracker.n},
                                  {"vicinity_px", cfg.tracker.vicinity_px}};
  summary["rescale_factor"] = kExponentRescaleFactor;
  ojson levels = ojson::array();
  for (const auto& l : report.levels) {
    levels.push_back({{"level", l.level},
                      {"fp_raw", l.fp_raw},
                      {"fp_rescaled", l.fp_rescaled},
                      {"fn_raw", l.fn_raw},
                      {"fn_rescaled", l.fn_rescaled}});
  }
  summary["levels"] = levels;
  summary["due"] = {{"raw", report.due_raw}, {"rescaled", report.due_rescaled}};
  ojson by_bit = ojson::array();
  for (const auto& b : report.by_bit) {
    by_bit.push_back(
        {{"bit", b.bit}, {"faults", b.faults}, {"fp_occ", opt(b.fp_occ)}, {"fn_vac", opt(b.fn_vac)}});
  }
  summary["by_bit"] = by_bit;
  summary["baseline"] = {{"a_fp_occ_orig", opt(report.baseline_fp_occ)},
                         {"a_fn_vac_orig", opt(report.baseline_fn_vac)}};
  written.push_back(write_file(dir, "summary.json", summary.dump(2) + "\n"));

  std::ostringstream faults;
  faults << "fault_id,target,layer,coords,bit,mode,due";
  for (double level : cfg.severity_levels) faults << ",fp_at_" << num(level);
  for (double level : cfg.severity_levels) faults << ",fn_at_" << num(level);
  faults << ",fp_occ_mean,fn_vac_mean\n";
  for (const auto& f : report.faults) {
    faults << f.fault_id << ',' << to_string(f.fault.target) << ',' << f.fault.layer << ','
           << coords_text(f.fault.coords) << ',' << f.fault.bit.index << ','
           << to_string(f.fault.mode) << ',' << (f.due ? 1 : 0);
    for (const auto& [level, hit] : f.fp_levels) faults << ',' << (hit ? 1 : 0);
    for (const auto& [level, hit] : f.fn_levels) faults << ',' << (hit ? 1 : 0);
    faults << ',' << num(f.fp_mean) << ',' << num(f.fn_mean) << '\n';
  }
  written.push_back(write_file(dir, "faults.csv", faults.str()));

  std::ostringstream bits;
  bits << "bit,faults,fp_occ,fn_vac\n";
  for (const auto& b : report.by_bit) {
    bits << b.bit << ',' << b.faults << ',' << num(b.fp_occ) << ',' << num(b.fn_vac) << '\n';
  }
  written.push_back(write_file(dir, "occupancy_by_bit.csv", bits.str()));

  std::ostringstream series;
  series << "fault_id,frame,fp_occ,fn_vac\n";
  for (const auto& f : report.faults) {
    for (std::size_t t = 0; t < f.fp_series.size(); ++t) {
      series << f.fault_id << ',' << t << ',' << num(f.fp_series[t]) << ','
             << num(f.fn_series[t]) << '\n';
    }
  }
  written.push_back(write_file(dir, "series.csv", series.str()));

  for (const auto& f : report.faults) {
    if (f.fault_id >= cfg.export_masks) continue;
    const fs::path mask_dir = dir / "masks";
    make_dir(mask_dir);
    for (std::size_t t = f.fp_verdict.first_tracked_frame; t < f.fp_verdict.persistent.size(); ++t) {
      const std::string stem = "fault" + std::to_string(f.fault_id) + "_frame" + std::to_string(t);
      write_pgm(f.fp_verdict.persistent[t], mask_dir / (stem + "_fp.pgm"));
      write_pgm(f.fn_verdict.persistent[t], mask_dir / (stem + "_fn.pgm"));
      written.push_back(mask_dir / (stem + "_fp.pgm"));
      written.push_back(mask_dir / (stem + "_fn.pgm"));
    }
  }
  return written;
}

std::vector<fs::path> write_pr_report(const std::vector<PrExperimentCurve>& curves,
                                      const CampaignConfig& cfg, const fs::path& dir) {
  make_dir(dir);
  std::vector<fs::path> written;

  ojson summary;
  summary["config"] = config_echo(cfg);
  summary["config"]["synthetic"] = {{"n_objects", cfg.synthetic.n_objects},
                                    {"p_tp", cfg.synthetic.p_tp},
                                    {"fp_rate", cfg.synthetic.fp_rate},
                                    {"conf_low", cfg.synthetic.conf_low},
                                    {"conf_high", cfg.synthetic.conf_high}};
  ojson list = ojson::array();
  const double base_ap = curves.empty() ? 0.0 : curves.front().ap50;
  for (const auto& c : curves) {
    list.push_back({{"curve", c.name},
                    {"n_gt", c.set.n_gt},
                    {"tp", c.set.tp_count()},
                    {"fp", c.set.fp_count()},
                    {"ap50", c.ap50},
                    {"delta_ap50", c.ap50 - base_ap}});
  }
  summary["curves"] = list;
  written.push_back(write_file(dir, "summary.json", summary.dump(2) + "\n"));

  std::ostringstream pr;
  pr << "curve,rank,recall,precision\n";
  for (const auto& c : curves) {
    for (std::size_t k = 0; k < c.curve.points.size(); ++k) {
      pr << c.name << ',' << k << ',' << num(c.curve.points[k].recall) << ','
         << num(c.curve.points[k].precision) << '\n';
    }
  }
  written.push_back(write_file(dir, "pr_curves.csv", pr.str()));

  std::ostringstream ap;
  ap << "curve,n_gt,tp,fp,ap50,delta_ap50\n";
  for (const auto& c : curves) {
    ap << c.name << ',' << c.set.n_gt << ',' << c.set.tp_count() << ',' << c.set.fp_count() << ','
       << num(c.ap50) << ',' << num(c.ap50 - base_ap) << '\n';
  }
  written.push_back(write_file(dir, "ap_summary.csv", ap.str()));
  return written;
}

}  // namespace ivmod
