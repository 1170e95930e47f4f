// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <bit>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ivmod/campaign.hpp"
#include "ivmod/errors.hpp"

namespace py = pybind11;
using namespace ivmod;

namespace {

using CountsTuple = std::tuple<std::size_t, std::size_t, std::size_t>;

Counts to_counts(const CountsTuple& t) {
  return Counts{std::get<0>(t), std::get<1>(t), std::get<2>(t)};
}

CategoryPolicy make_policy(const std::string& mode,
                           const std::optional<std::vector<std::vector<int>>>& clusters) {
  if (mode == "strict") return CategoryPolicy::strict();
  if (mode == "none") return CategoryPolicy::none();
  if (mode == "clusters") return CategoryPolicy::clusters(clusters.value_or(std::vector<std::vector<int>>{}));
  throw ArgumentError("policy must be strict, clusters or none");
}

ApInterpolation parse_interpolation(const std::string& text) {
  if (text == "coco101") return ApInterpolation::kCoco101;
  if (text == "continuous") return ApInterpolation::kContinuous;
  throw ArgumentError("interpolation must be coco101 or continuous");
}

py::array_t<std::uint8_t> to_array(const OccupancyMask& mask) {
  py::array_t<std::uint8_t> out({mask.height(), mask.width()});
  auto data = mask.data();
  std::copy(data.begin(), data.end(), out.mutable_data());
  return out;
}

OccupancyMask from_array(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw ArgumentError("masks must be two-dimensional");
  const int h = static_cast<int>(a.shape(0));
  const int w = static_cast<int>(a.shape(1));
  OccupancyMask mask(w, h);
  const auto* p = a.data();
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (p[static_cast<std::size_t>(r) * w + c]) mask.set(r, c);
    }
  }
  return mask;
}

std::optional<FaultDescriptor> to_fault(const std::optional<py::dict>& spec) {
  if (!spec) return std::nullopt;
  const py::dict& d = *spec;
  FaultDescriptor f;
  f.target = parse_fault_target(d.contains("target") ? d["target"].cast<std::string>() : "neuron");
  f.layer = d["layer"].cast<int>();
  f.coords = d["coords"].cast<std::vector<int>>();
  f.bit.index = d["bit"].cast<int>();
  f.mode = parse_fault_mode(d.contains("mode") ? d["mode"].cast<std::string>() : "transient_flip");
  return f;
}

py::object optional_float(const std::optional<double>& v) {
  return v ? py::object(py::float_(*v)) : py::object(py::none());
}

std::vector<std::filesystem::path> run_campaign(const std::string& mode_text,
                                                const std::filesystem::path& out_dir,
                                                const std::string& config_json,
                                                std::optional<std::uint64_t> seed,
                                                std::optional<unsigned> workers) {
  const CampaignMode mode = parse_campaign_mode(mode_text);
  CampaignConfig cfg = parse_config(config_json, mode);
  if (seed) cfg.seed = seed;
  if (workers) cfg.workers = *workers;
  py::gil_scoped_release release;
  switch (mode) {
    case CampaignMode::kTransient:
      return write_transient_report(run_transient(cfg), cfg, out_dir);
    case CampaignMode::kPermanent:
      return write_permanent_report(run_permanent(cfg), cfg, out_dir);
    case CampaignMode::kIngest: {
      cfg.validate();
      const auto orig = read_records(cfg.orig_records);
      const auto corr = read_records(cfg.corr_records);
      return write_transient_report(ingest_and_score(orig, corr, cfg), cfg, out_dir);
    }
    case CampaignMode::kSimulatePr:
      return write_pr_report(simulate_pr(cfg), cfg, out_dir);
    case CampaignMode::kExport: {
      std::filesystem::create_directories(out_dir);
      const auto path = out_dir / "records.jsonl";
      write_records(path, export_records(cfg));
      return {path};
    }
  }
  return {};
}

}  // namespace

PYBIND11_MODULE(_ivmod, m) {
  m.doc() = "Bit-fault vulnerability metrics for object detection";

  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  py::class_<Box>(m, "Box")
      .def(py::init<>())
      .def(py::init([](double x1, double y1, double x2, double y2) { return Box{x1, y1, x2, y2}; }),
           py::arg("x1"), py::arg("y1"), py::arg("x2"), py::arg("y2"))
      .def_readwrite("x1", &Box::x1)
      .def_readwrite("y1", &Box::y1)
      .def_readwrite("x2", &Box::x2)
      .def_readwrite("y2", &Box::y2)
      .def_property_readonly("area", &Box::area)
      .def(py::self == py::self)
      .def("__repr__", [](const Box& b) {
        return "Box(" + std::to_string(b.x1) + ", " + std::to_string(b.y1) + ", " +
               std::to_string(b.x2) + ", " + std::to_string(b.y2) + ")";
      });

  py::class_<Detection>(m, "Detection")
      .def(py::init([](Box box, int category, double confidence) {
             return Detection{box, category, confidence};
           }),
           py::arg("box"), py::arg("category") = 0, py::arg("confidence") = 1.0)
      .def_readwrite("box", &Detection::box)
      .def_readwrite("category", &Detection::category)
      .def_readwrite("confidence", &Detection::confidence)
      .def(py::self == py::self)
      .def("__repr__", [](const Detection& d) {
        return "Detection(category=" + std::to_string(d.category) +
               ", confidence=" + std::to_string(d.confidence) + ")";
      });

  m.def(
      "apply_fault",
      [](float value, int bit, const std::string& mode) {
        return apply_fault(value, BitPosition{bit}, parse_fault_mode(mode));
      },
      py::arg("value"), py::arg("bit"), py::arg("mode") = "transient_flip",
      "Corrupts one bit of a binary32 value.");
  m.def(
      "apply_fault_bits",
      [](std::uint32_t pattern, int bit, const std::string& mode) {
        return apply_fault_bits(pattern, BitPosition{bit}, parse_fault_mode(mode));
      },
      py::arg("pattern"), py::arg("bit"), py::arg("mode") = "transient_flip");
  m.def(
      "classify_value", [](float value) { return std::string(to_string(classify_value(value))); },
      py::arg("value"));

  m.def("iou", &iou, py::arg("a"), py::arg("b"));
  m.def(
      "nms",
      [](const std::vector<Detection>& dets, double thr, std::size_t max_detections) {
        return nms(dets, thr, max_detections);
      },
      py::arg("detections"), py::arg("iou_threshold") = 0.5,
      py::arg("max_detections") = kDefaultMaxDetections);
  m.def(
      "rasterize",
      [](const std::vector<Box>& boxes, int width, int height) {
        return to_array(rasterize(std::span<const Box>(boxes), width, height));
      },
      py::arg("boxes"), py::arg("width"), py::arg("height"));

  m.def(
      "assign",
      [](const std::vector<Detection>& preds, const std::vector<Detection>& gts, double thr,
         const std::string& policy, const std::optional<std::vector<std::vector<int>>>& clusters) {
        const auto out = assign(preds, gts, thr, make_policy(policy, clusters));
        py::list pairs;
        for (const auto& p : out.pairs) pairs.append(py::make_tuple(p.pred, p.gt, p.iou));
        py::dict d;
        d["tp"] = out.tp;
        d["fp"] = out.fp;
        d["fn"] = out.fn;
        d["pairs"] = pairs;
        return d;
      },
      py::arg("predictions"), py::arg("ground_truth"), py::arg("iou_threshold") = 0.5,
      py::arg("policy") = "strict", py::arg("clusters") = py::none());

  m.def(
      "average_precision",
      [](const DetectionsByImage& preds, const DetectionsByImage& gts, double thr,
         const std::string& interpolation) {
        const auto r = average_precision(preds, gts, thr, parse_interpolation(interpolation));
        py::dict d;
        d["mean"] = r.mean;
        d["per_category"] = r.per_category;
        return d;
      },
      py::arg("predictions"), py::arg("ground_truth"), py::arg("iou_threshold") = 0.5,
      py::arg("interpolation") = "coco101");
  m.def(
      "mean_average_precision",
      [](const DetectionsByImage& preds, const DetectionsByImage& gts,
         const std::string& interpolation) {
        return mean_average_precision(preds, gts, parse_interpolation(interpolation));
      },
      py::arg("predictions"), py::arg("ground_truth"), py::arg("interpolation") = "coco101");

  m.def(
      "classify_image",
      [](const CountsTuple& orig, const CountsTuple& corr, bool inf, bool nan) {
        ImageEval e;
        e.orig = to_counts(orig);
        e.corr = to_counts(corr);
        e.inf_flag = inf;
        e.nan_flag = nan;
        return std::string(to_string(classify_image(e)));
      },
      py::arg("orig"), py::arg("corr"), py::arg("inf") = false, py::arg("nan") = false,
      "Counts are (tp, fp, fn) tuples.");
  m.def(
      "rates",
      [](const std::vector<std::tuple<CountsTuple, CountsTuple, bool, bool>>& images) {
        std::vector<ImageEval> evals;
        for (const auto& [o, c, inf, nan] : images) {
          ImageEval e;
          e.orig = to_counts(o);
          e.corr = to_counts(c);
          e.inf_flag = inf;
          e.nan_flag = nan;
          evals.push_back(e);
        }
        const auto r = rates(evals);
        return py::make_tuple(r.sdc, r.due);
      },
      py::arg("images"), "Each image is (orig_counts, corr_counts, inf, nan); returns (sdc, due).");
  m.def(
      "severity",
      [](const CountsTuple& orig, const CountsTuple& corr, const std::vector<Detection>& dets_orig,
         const std::vector<Detection>& dets_corr, int width, int height) {
        ImageEval e;
        e.orig = to_counts(orig);
        e.corr = to_counts(corr);
        const auto r = severity(e, dets_orig, dets_corr, {}, ImageDims{width, height});
        py::dict d;
        d["verdict"] = std::string(to_string(r.verdict));
        d["delta_fp"] = r.delta_fp;
        d["delta_fn_n"] = optional_float(r.delta_fn_n);
        d["a_fp_occ"] = r.a_fp_occ;
        d["a_fn_vac"] = optional_float(r.a_fn_vac);
        d["avg_conf_orig"] = optional_float(r.avg_conf_orig);
        d["avg_conf_corr"] = optional_float(r.avg_conf_corr);
        d["avg_size_orig"] = optional_float(r.avg_size_orig);
        d["avg_size_corr"] = optional_float(r.avg_size_corr);
        return d;
      },
      py::arg("orig"), py::arg("corr"), py::arg("detections_orig"), py::arg("detections_corr"),
      py::arg("width"), py::arg("height"));

  m.def(
      "track",
      [](const std::vector<py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>>& masks,
         int m_of, int n_of, int vicinity_px, bool coasting) {
        std::vector<OccupancyMask> frames;
        for (const auto& a : masks) frames.push_back(from_array(a));
        const auto verdict = track(frames, TrackerConfig{m_of, n_of, vicinity_px, coasting});
        std::vector<py::array_t<std::uint8_t>> out;
        for (const auto& mask : verdict.persistent) out.push_back(to_array(mask));
        return out;
      },
      py::arg("masks"), py::arg("m") = 10, py::arg("n") = 15, py::arg("vicinity_px") = 50,
      py::arg("coasting") = true);

  py::class_<Scene>(m, "Scene")
      .def_readonly("width", &Scene::width)
      .def_readonly("height", &Scene::height)
      .def_property_readonly("pixels",
                             [](const Scene& s) {
                               py::array_t<float> out({s.height, s.width});
                               std::copy(s.pixels.begin(), s.pixels.end(), out.mutable_data());
                               return out;
                             })
      .def_property_readonly("ground_truth", &Scene::ground_truth);

  m.def(
      "generate_scene",
      [](std::uint64_t seed, int width, int height, int min_objects, int max_objects) {
        SceneSpec spec;
        spec.width = width;
        spec.height = height;
        spec.min_objects = min_objects;
        spec.max_objects = max_objects;
        return generate_scene(spec, seed);
      },
      py::arg("seed"), py::arg("width") = 96, py::arg("height") = 96, py::arg("min_objects") = 1,
      py::arg("max_objects") = 5);
  m.def(
      "infer",
      [](const Scene& scene, const std::optional<py::dict>& fault) {
        const auto model = DetectorModel::analytic(scene.width, scene.height);
        const auto trace = infer(model, scene, to_fault(fault));
        py::dict d;
        d["detections"] = trace.detections;
        d["nan"] = trace.nan_seen;
        d["inf"] = trace.inf_seen;
        return d;
      },
      py::arg("scene"), py::arg("fault") = py::none(),
      "Runs the analytic detector. `fault` is a dict with target, layer, coords, bit, mode.");

  m.def(
      "simulate_pr",
      [](std::uint64_t seed) {
        auto cfg = default_config(CampaignMode::kSimulatePr);
        cfg.seed = seed;
        py::list out;
        for (const auto& c : simulate_pr(cfg)) {
          py::dict d;
          d["name"] = c.name;
          d["ap50"] = c.ap50;
          d["tp"] = c.set.tp_count();
          d["fp"] = c.set.fp_count();
          d["n_gt"] = c.set.n_gt;
          out.append(d);
        }
        return out;
      },
      py::arg("seed"));

  m.def("run_campaign", &run_campaign, py::arg("mode"), py::arg("out_dir"),
        py::arg("config") = "{}", py::arg("seed") = py::none(), py::arg("workers") = py::none(),
        "Runs a campaign from JSON config text and writes its reports; returns the written paths.");
}
