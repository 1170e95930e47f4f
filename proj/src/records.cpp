// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include "ivmod/records.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>

#include "ivmod/errors.hpp"

namespace ivmod {
namespace {

using nlohmann::json;

// Thrown inside a line parse and rethrown as DataError with location.
struct LineError {
  std::string message;
};

const json& field(const json& obj, const char* name) {
  if (!obj.is_object()) throw LineError{"expected an object"};
  const auto it = obj.find(name);
  if (it == obj.end()) throw LineError{std::string("missing field '") + name + "'"};
  return *it;
}

double number(const json& value, const char* what) {
  if (!value.is_number()) throw LineError{std::string("'") + what + "' must be a number"};
  return value.get<double>();
}

int integer(const json& value, const char* what) {
  if (!value.is_number_integer()) throw LineError{std::string("'") + what + "' must be an integer"};
  return value.get<int>();
}

// Returns false when a coordinate is null or non-finite.
bool parse_bbox(const json& value, Box& box) {
  if (!value.is_array() || value.size() != 4) throw LineError{"'bbox' must hold 4 values"};
  double c[4];
  for (int k = 0; k < 4; ++k) {
    if (value[k].is_null()) return false;
    c[k] = number(value[k], "bbox");
    if (!std::isfinite(c[k])) return false;
  }
  box = Box{c[0], c[1], c[2], c[3]};
  return true;
}

void parse_objects(const json& list, bool with_confidence, DetectionRecord& rec,
                   std::vector<Detection>& out) {
  if (!list.is_array()) throw LineError{"detection lists must be arrays"};
  for (const auto& item : list) {
    Detection det;
    det.category = integer(field(item, "category"), "category");
    if (with_confidence) {
      det.confidence = number(field(item, "confidence"), "confidence");
      if (!(det.confidence >= 0.0 && det.confidence <= 1.0)) {
        throw LineError{"confidence outside [0, 1]"};
      }
    }
    Box box;
    if (!parse_bbox(field(item, "bbox"), box)) {
      rec.nan = true;
      continue;
    }
    det.box = clip(box, rec.width, rec.height);
    out.push_back(det);
  }
}

DetectionRecord parse_line(const std::string& line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw LineError{std::string("invalid JSON: ") + e.what()};
  }
  DetectionRecord rec;
  const json& id = field(doc, "image_id");
  if (id.is_string()) {
    rec.image_id = id.get<std::string>();
  } else if (id.is_number_integer()) {
    rec.image_id = std::to_string(id.get<long long>());
  } else {
    throw LineError{"'image_id' must be a string or integer"};
  }
  rec.width = integer(field(doc, "width"), "width");
  rec.height = integer(field(doc, "height"), "height");
  if (rec.width <= 0 || rec.height <= 0) throw LineError{"image dimensions must be positive"};
  if (const auto flags = doc.find("flags"); flags != doc.end()) {
    if (!flags->is_object()) throw LineError{"'flags' must be an object"};
    rec.nan = flags->value("nan", false);
    rec.inf = flags->value("inf", false);
  }
  parse_objects(field(doc, "detections"), true, rec, rec.detections);
  if (const auto gts = doc.find("ground_truth"); gts != doc.end()) {
    parse_objects(*gts, false, rec, rec.ground_truth);
  }
  return rec;
}

nlohmann::ordered_json objects_json(const std::vector<Detection>& dets, bool with_confidence) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& d : dets) {
    nlohmann::ordered_json item = nlohmann::ordered_json::object();
    item["bbox"] = {d.box.x1, d.box.y1, d.box.x2, d.box.y2};
    item["category"] = d.category;
    if (with_confidence) item["confidence"] = d.confidence;
    list.push_back(std::move(item));
  }
  return list;
}

}  // namespace

std::vector<DetectionRecord> read_records(std::istream& in, std::string_view source) {
  std::vector<DetectionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(parse_line(line));
    } catch (const LineError& e) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.message);
    } catch (const json::exception& e) {
      throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::vector<DetectionRecord> read_records(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw DataError("cannot open record file " + path.string());
  return read_records(file, path.string());
}

std::string to_json_line(const DetectionRecord& record) {
  nlohmann::ordered_json doc;
  doc["image_id"] = record.image_id;
  doc["width"] = record.width;
  doc["height"] = record.height;
  doc["detections"] = objects_json(record.detections, true);
  doc["ground_truth"] = objects_json(record.ground_truth, false);
  doc["flags"] = {{"nan", record.nan}, {"inf", record.inf}};
  return doc.dump();
}

void write_records(std::ostream& out, std::span<const DetectionRecord> records) {
  for (const auto& rec : records) out << to_json_line(rec) << '\n';
}

void write_records(const std::filesystem::path& path, std::span<const DetectionRecord> records) {
  std::ofstream file(path);
  if (!file) throw DataError("cannot open " + path.string() + " for writing");
  write_records(file, records);
}

}  // namespace ivmod
