// Copyright 2026 The Shopsense Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Detection-stream and annotation file formats.
//
// A detection stream is UTF-8 JSON Lines. Line 1 is the header:
//
//   {"version":1,"fps":15.0,"meters_per_pixel":0.005,"frame_width":640,
//    "frame_height":480,"roi_y":240,"embedding_dim":128,"source_id":"..."}
//
// and every following line is one frame:
//
//   {"frame":n,"dets":[{"cx":..,"cy":..,"w":..,"h":..,"conf":..,
//     "emb":[..], "patch":{"w":..,"h":..,"rgb_b64":".."},
//     "pose":[[x,y,v], ... 33 entries]}]}
//
// "emb", "patch" and "pose" are optional. Unknown keys are ignored.
// Everything crossing this boundary is validated against the model
// invariants, so downstream stages never re-check.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shopsense/model.hpp"

namespace shopsense {

struct StreamHeader {
  int version = 1;
  Calibration calibration;
  RoiConfig roi;
  int embedding_dim = 0;  // 0 when records carry no embeddings
  std::string source_id;

  bool operator==(const StreamHeader&) const = default;
};

struct FrameRecord {
  std::int64_t frame_index = 0;
  std::vector<Detection> detections;

  bool operator==(const FrameRecord&) const = default;
};

struct DetectionStream {
  StreamHeader header;
  std::vector<FrameRecord> frames;

  bool operator==(const DetectionStream&) const = default;
};

// Pull parser over a detection stream. The header is read and validated on
// construction; records are validated one at a time by next().
class StreamReader {
 public:
  explicit StreamReader(std::istream& in);

  const StreamHeader& header() const noexcept { return header_; }
  std::optional<FrameRecord> next();
  std::size_t line() const noexcept { return line_; }

 private:
  std::istream& in_;
  StreamHeader header_;
  std::size_t line_ = 0;
  std::int64_t last_frame_ = -1;
};

DetectionStream parse_stream(std::istream& in);
DetectionStream read_stream_file(const std::filesystem::path& path);

void emit_stream(const StreamHeader& header, std::span<const FrameRecord> frames,
                 std::ostream& out);
std::string emit_stream(const DetectionStream& stream);
void write_stream_file(const DetectionStream& stream, const std::filesystem::path& path);

// Manually coded ground truth for one video.
struct GroundTruthEncounter {
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;
  InteractionClass cls = InteractionClass::Neutral;
  int n_customers = 1;

  bool operator==(const GroundTruthEncounter&) const = default;
};

struct GroundTruth {
  std::string video_id;  // optional; empty when absent
  int customer_count = 0;
  std::vector<GroundTruthEncounter> encounters;

  bool operator==(const GroundTruth&) const = default;
};

// {"customer_count":N,"encounters":[{"start":f0,"end":f1,"class":"neutral","n":1}]}
// with an optional "video_id".
GroundTruth parse_annotations(std::istream& in);
GroundTruth read_annotations_file(const std::filesystem::path& path);
void emit_annotations(const GroundTruth& gt, std::ostream& out);

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws SchemaError on characters outside the standard alphabet.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace shopsense
