// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "ivmod/campaign.hpp"
#include "ivmod/errors.hpp"

namespace ivmod {
namespace {

using nlohmann::json;

// Reads typed members of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(label() + " must be an object");
  }

  [[nodiscard]] bool has(const char* key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  template <typename T>
  void read(const char* key, T& out) {
    if (!has(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(label(key) + " has the wrong type");
    }
  }

  // Unsigned counts reject negative input instead of wrapping.
  void read_count(const char* key, std::size_t& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ConfigError(label(key) + " must be a non-negative integer");
    }
    out = v.get<std::size_t>();
  }

  template <typename Parse>
  void read_enum(const char* key, Parse parse) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_string()) throw ConfigError(label(key) + " must be a string");
    try {
      parse(v.get<std::string>());
    } catch (const ArgumentError& e) {
      throw ConfigError(label(key) + ": " + e.what());
    }
  }

  [[nodiscard]] Section sub(const char* key) {
    seen_.insert(key);
    return Section(obj_.at(key), label(key));
  }

  [[nodiscard]] const json& raw(const char* key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown config key " + label(key.c_str()));
    }
  }

 private:
  [[nodiscard]] std::string label(const char* key = nullptr) const {
    const std::string base = path_.empty() ? std::string() : path_;
    if (key == nullptr) return base.empty() ? "config" : "'" + base + "'";
    return "'" + (base.empty() ? std::string(key) : base + "." + key) + "'";
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

CategoryPolicy parse_policy(Section section) {
  std::string mode = "strict";
  section.read("mode", mode);
  CategoryPolicy policy = CategoryPolicy::strict();
  if (mode == "strict") {
    policy = CategoryPolicy::strict();
  } else if (mode == "none") {
    policy = CategoryPolicy::none();
  } else if (mode == "clusters") {
    std::vector<std::vector<int>> groups;
    section.read("clusters", groups);
    try {
      policy = CategoryPolicy::clusters(std::move(groups));
    } catch (const ArgumentError& e) {
      throw ConfigError(std::string("category_policy: ") + e.what());
    }
  } else {
    throw ConfigError("category_policy.mode must be strict, clusters or none");
  }
  (void)section.has("clusters");
  section.finish();
  return policy;
}

Perturbation parse_perturbation(Section section) {
  std::string kind;
  section.read("kind", kind);
  Perturbation out;
  if (kind == "add_fps") {
    AddFps add;
    section.read_count("count", add.count);
    section.read("conf_low", add.conf_low);
    section.read("conf_high", add.conf_high);
    out = add;
  } else if (kind == "remove_tps") {
    RemoveTps remove;
    section.read_count("count", remove.count);
    out = remove;
  } else {
    throw ConfigError("perturbation kind must be add_fps or remove_tps");
  }
  section.finish();
  return out;
}

}  // namespace

std::string_view to_string(CampaignMode mode) {
  switch (mode) {
    case CampaignMode::kTransient: return "transient";
    case CampaignMode::kPermanent: return "permanent";
    case CampaignMode::kIngest: return "ingest";
    case CampaignMode::kSimulatePr: return "simulate_pr";
    case CampaignMode::kExport: return "export";
  }
  return "unknown";
}

CampaignMode parse_campaign_mode(std::string_view text) {
  if (text == "transient") return CampaignMode::kTransient;
  if (text == "permanent") return CampaignMode::kPermanent;
  if (text == "ingest") return CampaignMode::kIngest;
  if (text == "simulate_pr" || text == "simulate-pr") return CampaignMode::kSimulatePr;
  if (text == "export") return CampaignMode::kExport;
  throw ArgumentError("unknown campaign mode '" + std::string(text) + "'");
}

CampaignConfig default_config(CampaignMode mode) {
  CampaignConfig cfg;
  cfg.mode = mode;
  if (mode == CampaignMode::kPermanent) {
    cfg.n_injections = 100;
    cfg.bit_policy = BitPolicy::kExponentOnly;
    cfg.fault_mode = FaultMode::kStuckAt1;
  }
  return cfg;
}

void CampaignConfig::validate() const {
  if (!seed) throw ConfigError("seed is required");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ConfigError("iou_threshold must lie in (0, 1]");
  }
  switch (mode) {
    case CampaignMode::kTransient:
      if (n_injections == 0) throw ConfigError("n_injections must be positive");
      break;
    case CampaignMode::kPermanent:
      if (n_injections == 0) throw ConfigError("n_injections must be positive");
      if (bit_policy != BitPolicy::kExponentOnly) {
        throw ConfigError("permanent campaigns inject exponent bits only (bit_policy exponent_only)");
      }
      if (fault_mode != FaultMode::kStuckAt1) {
        throw ConfigError("permanent campaigns use stuck_at_1 faults");
      }
      try {
        tracker.validate();
      } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
      }
      if (sequence.frames < tracker.n) {
        throw ConfigError("sequence.frames must be at least tracker.n");
      }
      for (double level : severity_levels) {
        if (!(level >= 0.0 && level <= 1.0)) throw ConfigError("severity levels must lie in [0, 1]");
      }
      break;
    case CampaignMode::kIngest:
      if (orig_records.empty() || corr_records.empty()) {
        throw ConfigError("ingest needs orig_records and corr_records");
      }
      break;
    case CampaignMode::kSimulatePr:
      try {
        synthetic.validate();
      } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
      }
      break;
    case CampaignMode::kExport:
      if (n_images == 0) throw ConfigError("n_images must be positive");
      break;
  }
}

CampaignConfig parse_config(std::string_view json_text, CampaignMode mode) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  CampaignConfig cfg = default_config(mode);
  Section root(doc, "");
  root.read_enum("mode", [&](const std::string& text) {
    if (parse_campaign_mode(text) != mode) {
      throw ConfigError("config mode '" + text + "' does not match the requested campaign");
    }
  });
  if (root.has("seed")) {
    const json& v = root.raw("seed");
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ConfigError("'seed' must be a non-negative integer");
    }
    cfg.seed = v.get<std::uint64_t>();
  }
  root.read_count("n_injections", cfg.n_injections);
  root.read_enum("target", [&](const std::string& t) { cfg.target = parse_fault_target(t); });
  root.read_enum("bit_policy", [&](const std::string& t) { cfg.bit_policy = parse_bit_policy(t); });
  root.read_enum("fault_mode", [&](const std::string& t) { cfg.fault_mode = parse_fault_mode(t); });
  root.read("iou_threshold", cfg.iou_threshold);
  if (root.has("category_policy")) cfg.category_policy = parse_policy(root.sub("category_policy"));
  root.read_enum("image_mode", [&](const std::string& t) {
    if (t == "per_injection") {
      cfg.image_mode = ImageMode::kPerInjection;
    } else if (t == "fixed") {
      cfg.image_mode = ImageMode::kFixed;
    } else {
      throw ArgumentError("expected per_injection or fixed");
    }
  });
  if (root.has("scene")) {
    Section s = root.sub("scene");
    s.read("width", cfg.scene.width);
    s.read("height", cfg.scene.height);
    s.read("min_objects", cfg.scene.min_objects);
    s.read("max_objects", cfg.scene.max_objects);
    s.read("min_size", cfg.scene.min_size);
    s.read("max_size", cfg.scene.max_size);
    s.finish();
  }
  if (root.has("sequence")) {
    Section s = root.sub("sequence");
    s.read("frames", cfg.sequence.frames);
    s.read("min_objects", cfg.sequence.min_objects);
    s.read("max_objects", cfg.sequence.max_objects);
    s.finish();
  }
  if (root.has("tracker")) {
    Section s = root.sub("tracker");
    s.read("m", cfg.tracker.m);
    s.read("n", cfg.tracker.n);
    s.read("vicinity_px", cfg.tracker.vicinity_px);
    s.finish();
  }
  root.read("severity_levels", cfg.severity_levels);
  root.read_count("export_masks", cfg.export_masks);
  std::string path;
  if (root.has("orig_records")) {
    root.read("orig_records", path);
    cfg.orig_records = path;
  }
  if (root.has("corr_records")) {
    root.read("corr_records", path);
    cfg.corr_records = path;
  }
  if (root.has("synthetic")) {
    Section s = root.sub("synthetic");
    s.read_count("n_objects", cfg.synthetic.n_objects);
    s.read("p_tp", cfg.synthetic.p_tp);
    s.read("fp_rate", cfg.synthetic.fp_rate);
    s.read("conf_low", cfg.synthetic.conf_low);
    s.read("conf_high", cfg.synthetic.conf_high);
    s.finish();
  }
  if (root.has("perturbations")) {
    const json& list = root.raw("perturbations");
    if (!list.is_array()) throw ConfigError("'perturbations' must be an array");
    cfg.perturbations.clear();
    for (std::size_t k = 0; k < list.size(); ++k) {
      cfg.perturbations.push_back(
          parse_perturbation(Section(list[k], "perturbations[" + std::to_string(k) + "]")));
    }
  }
  root.read_count("n_images", cfg.n_images);
  int workers = static_cast<int>(cfg.workers);
  root.read("workers", workers);
  if (workers < 1) throw ConfigError("'workers' must be at least 1");
  cfg.workers = static_cast<unsigned>(workers);
  root.finish();

  // Scene size also fixes the sequence size.
  cfg.sequence.width = cfg.scene.width;
  cfg.sequence.height = cfg.scene.height;
  return cfg;
}

CampaignConfig load_config(const std::filesystem::path& path, CampaignMode mode) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << file.rdbuf();
  return parse_config(text.str(), mode);
}

}  // namespace ivmod
