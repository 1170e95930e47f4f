// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0
//
// Newline-delimited JSON detection records, one image per line:
//   {"image_id": "...", "width": W, "height": H,
//    "detections": [{"bbox": [x1,y1,x2,y2], "category": c, "confidence": p}, ...],
//    "ground_truth": [{"bbox": [...], "category": c}, ...],
//    "flags": {"nan": false, "inf": false}}

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ivmod/geometry.hpp"

namespace ivmod {

struct DetectionRecord {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<Detection> detections;
  std::vector<Detection> ground_truth;
  bool nan = false;
  bool inf = false;
};

// Boxes are normalized and clipped to the image. A detection whose bbox holds
// a null (non-finite) coordinate is dropped and sets `nan`. Blank lines are
// skipped. Throws DataError naming `source` and the 1-based line on any
// malformed line, missing field or confidence outside [0, 1].
std::vector<DetectionRecord> read_records(std::istream& in, std::string_view source = "<stream>");
std::vector<DetectionRecord> read_records(const std::filesystem::path& path);

std::string to_json_line(const DetectionRecord& record);
void write_records(std::ostream& out, std::span<const DetectionRecord> records);
void write_records(const std::filesystem::path& path, std::span<const DetectionRecord> records);

}  // namespace ivmod
