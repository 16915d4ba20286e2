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

#include "shopsense/ingest.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace shopsense {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr double kEmbeddingNormTol = 1e-6;

const json& require(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(std::string("missing field \"") + key + "\"", line);
  return *it;
}

double number(const json& obj, const char* key, std::size_t line) {
  const json& v = require(obj, key, line);
  if (!v.is_number()) throw SchemaError(std::string("field \"") + key + "\" must be a number", line);
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw SchemaError(std::string("field \"") + key + "\" not finite", line);
  return x;
}

std::int64_t integer(const json& obj, const char* key, std::size_t line) {
  const json& v = require(obj, key, line);
  if (!v.is_number_integer()) {
    throw SchemaError(std::string("field \"") + key + "\" must be an integer", line);
  }
  return v.get<std::int64_t>();
}

json parse_line(const std::string& text, std::size_t line) {
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw SchemaError("expected a JSON object", line);
    return j;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what(), line);
  }
}

StreamHeader header_from_json(const json& j, std::size_t line) {
  StreamHeader h;
  h.version = static_cast<int>(integer(j, "version", line));
  if (h.version != 1) throw SchemaError("unsupported stream version " + std::to_string(h.version), line);
  h.calibration.fps = number(j, "fps", line);
  h.calibration.meters_per_pixel = number(j, "meters_per_pixel", line);
  h.calibration.frame_width = static_cast<int>(integer(j, "frame_width", line));
  h.calibration.frame_height = static_cast<int>(integer(j, "frame_height", line));
  h.roi.y_line = number(j, "roi_y", line);
  h.embedding_dim = static_cast<int>(integer(j, "embedding_dim", line));
  if (h.embedding_dim < 0) throw SchemaError("embedding_dim must be >= 0", line);
  if (auto it = j.find("source_id"); it != j.end()) {
    if (!it->is_string()) throw SchemaError("source_id must be a string", line);
    h.source_id = it->get<std::string>();
  }
  try {
    h.calibration.validate();
    h.roi.validate(h.calibration);
  } catch (const CalibrationError& e) {
    throw CalibrationError(e.what(), line);
  }
  return h;
}

Pose pose_from_json(const json& arr, std::size_t line) {
  if (!arr.is_array()) throw SchemaError("pose must be an array", line);
  if (arr.size() != kPoseKeypoints) {
    throw PoseArityError("pose has " + std::to_string(arr.size()) + " keypoints, expected 33", line);
  }
  Pose pose;
  for (std::size_t i = 0; i < kPoseKeypoints; ++i) {
    const json& kp = arr[i];
    if (!kp.is_array() || kp.size() != 3 || !kp[0].is_number() || !kp[1].is_number() ||
        !kp[2].is_number()) {
      throw SchemaError("keypoint " + std::to_string(i) + " must be [x,y,v]", line);
    }
    pose[i] = {kp[0].get<double>(), kp[1].get<double>(), kp[2].get<double>()};
    if (!std::isfinite(pose[i].x) || !std::isfinite(pose[i].y) || !(pose[i].visibility >= 0) ||
        !(pose[i].visibility <= 1)) {
      throw SchemaError("keypoint " + std::to_string(i) + " out of range", line);
    }
  }
  return pose;
}

Detection detection_from_json(const json& d, std::int64_t frame, int embedding_dim,
                              std::size_t line) {
  if (!d.is_object()) throw SchemaError("detection must be an object", line);
  Detection det;
  det.frame_index = frame;
  try {
    det.bbox = BBox(number(d, "cx", line), number(d, "cy", line), number(d, "w", line),
                    number(d, "h", line));
  } catch (const InvalidValue& e) {
    throw SchemaError(e.what(), line);
  }
  det.confidence = number(d, "conf", line);
  if (det.confidence < 0 || det.confidence > 1) throw SchemaError("conf outside [0,1]", line);

  if (auto it = d.find("emb"); it != d.end()) {
    if (!it->is_array()) throw SchemaError("emb must be an array", line);
    if (embedding_dim == 0 || static_cast<int>(it->size()) != embedding_dim) {
      throw SchemaError("emb length " + std::to_string(it->size()) +
                            " does not match embedding_dim " + std::to_string(embedding_dim),
                        line);
    }
    Eigen::VectorXd e(embedding_dim);
    for (int k = 0; k < embedding_dim; ++k) {
      if (!(*it)[k].is_number()) throw SchemaError("emb entries must be numbers", line);
      e[k] = (*it)[k].get<double>();
    }
    if (!e.allFinite() || std::abs(e.norm() - 1.0) > kEmbeddingNormTol) {
      throw SchemaError("emb must be unit-normalized", line);
    }
    det.embedding = std::move(e);
  }

  if (auto it = d.find("patch"); it != d.end()) {
    if (!it->is_object()) throw SchemaError("patch must be an object", line);
    RgbPatch p;
    p.width = static_cast<int>(integer(*it, "w", line));
    p.height = static_cast<int>(integer(*it, "h", line));
    const json& b64 = require(*it, "rgb_b64", line);
    if (!b64.is_string()) throw SchemaError("rgb_b64 must be a string", line);
    if (p.width <= 0 || p.height <= 0) throw SchemaError("patch dimensions must be > 0", line);
    try {
      p.rgb = base64_decode(b64.get_ref<const std::string&>());
    } catch (const SchemaError& e) {
      throw SchemaError(e.what(), line);
    }
    if (p.rgb.size() != static_cast<std::size_t>(p.width) * p.height * 3) {
      throw SchemaError("patch payload does not match declared w x h x 3", line);
    }
    det.patch = std::move(p);
  }

  if (auto it = d.find("pose"); it != d.end()) det.pose = pose_from_json(*it, line);
  return det;
}

ordered_json header_to_json(const StreamHeader& h) {
  ordered_json j;
  j["version"] = h.version;
  j["fps"] = h.calibration.fps;
  j["meters_per_pixel"] = h.calibration.meters_per_pixel;
  j["frame_width"] = h.calibration.frame_width;
  j["frame_height"] = h.calibration.frame_height;
  j["roi_y"] = h.roi.y_line;
  j["embedding_dim"] = h.embedding_dim;
  j["source_id"] = h.source_id;
  return j;
}

ordered_json detection_to_json(const Detection& det) {
  ordered_json d;
  d["cx"] = det.bbox.cx();
  d["cy"] = det.bbox.cy();
  d["w"] = det.bbox.w();
  d["h"] = det.bbox.h();
  d["conf"] = det.confidence;
  if (det.embedding) {
    ordered_json e = ordered_json::array();
    for (Eigen::Index k = 0; k < det.embedding->size(); ++k) e.push_back((*det.embedding)[k]);
    d["emb"] = std::move(e);
  }
  if (det.patch) {
    d["patch"] = {{"w", det.patch->width},
                  {"h", det.patch->height},
                  {"rgb_b64", base64_encode(det.patch->rgb)}};
  }
  if (det.pose) {
    ordered_json p = ordered_json::array();
    for (const Keypoint& kp : det.pose->keypoints) p.push_back({kp.x, kp.y, kp.visibility});
    d["pose"] = std::move(p);
  }
  return d;
}

constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const unsigned v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kB64[(v >> 18) & 63];
    out += kB64[(v >> 12) & 63];
    out += kB64[(v >> 6) & 63];
    out += kB64[v & 63];
  }
  if (const std::size_t rest = bytes.size() - i; rest > 0) {
    unsigned v = bytes[i] << 16;
    if (rest == 2) v |= bytes[i + 1] << 8;
    out += kB64[(v >> 18) & 63];
    out += kB64[(v >> 12) & 63];
    out += rest == 2 ? kB64[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  static const std::array<int, 256> table = [] {
    std::array<int, 256> t{};
    t.fill(-1);
    for (int i = 0; i < 64; ++i) t[static_cast<unsigned char>(kB64[i])] = i;
    return t;
  }();
  if (text.size() % 4 != 0) throw SchemaError("base64 length not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int v[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        v[k] = 0;
        ++pad;
        continue;
      }
      if (pad > 0) throw SchemaError("misplaced base64 padding");
      v[k] = table[static_cast<unsigned char>(c)];
      if (v[k] < 0) throw SchemaError("invalid base64 character");
    }
    const unsigned word = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<std::uint8_t>(word >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(word >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(word));
  }
  return out;
}

StreamReader::StreamReader(std::istream& in) : in_(in) {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    if (text.empty()) continue;
    header_ = header_from_json(parse_line(text, line_), line_);
    return;
  }
  throw SchemaError("stream has no header line", line_ ? line_ : 1);
}

std::optional<FrameRecord> StreamReader::next() {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    if (text.empty()) continue;
    const json j = parse_line(text, line_);
    FrameRecord rec;
    rec.frame_index = integer(j, "frame", line_);
    if (rec.frame_index < 0) throw SchemaError("frame index must be >= 0", line_);
    if (rec.frame_index < last_frame_) throw SchemaError("frame index decreased", line_);
    last_frame_ = rec.frame_index;
    const json& dets = require(j, "dets", line_);
    if (!dets.is_array()) throw SchemaError("dets must be an array", line_);
    rec.detections.reserve(dets.size());
    for (const json& d : dets) {
      rec.detections.push_back(
          detection_from_json(d, rec.frame_index, header_.embedding_dim, line_));
    }
    return rec;
  }
  return std::nullopt;
}

DetectionStream parse_stream(std::istream& in) {
  StreamReader reader(in);
  DetectionStream out;
  out.header = reader.header();
  while (auto rec = reader.next()) out.frames.push_back(std::move(*rec));
  return out;
}

DetectionStream read_stream_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_stream(in);
}

void emit_stream(const StreamHeader& header, std::span<const FrameRecord> frames,
                 std::ostream& out) {
  out << header_to_json(header).dump() << '\n';
  for (const FrameRecord& rec : frames) {
    ordered_json j;
    j["frame"] = rec.frame_index;
    ordered_json dets = ordered_json::array();
    for (const Detection& det : rec.detections) dets.push_back(detection_to_json(det));
    j["dets"] = std::move(dets);
    out << j.dump() << '\n';
  }
  if (!out) throw Error("write failed while emitting stream");
}

std::string emit_stream(const DetectionStream& stream) {
  std::ostringstream out;
  emit_stream(stream.header, stream.frames, out);
  return std::move(out).str();
}

void write_stream_file(const DetectionStream& stream, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  emit_stream(stream.header, stream.frames, out);
}

GroundTruth parse_annotations(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed annotation JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("annotation document must be an object");
  GroundTruth gt;
  if (auto it = j.find("video_id"); it != j.end()) {
    if (!it->is_string()) throw SchemaError("video_id must be a string");
    gt.video_id = it->get<std::string>();
  }
  const std::int64_t count = integer(j, "customer_count", 0);
  if (count < 0) throw SchemaError("customer_count must be >= 0");
  gt.customer_count = static_cast<int>(count);
  const json& encs = require(j, "encounters", 0);
  if (!encs.is_array()) throw SchemaError("encounters must be an array");
  for (std::size_t i = 0; i < encs.size(); ++i) {
    const json& e = encs[i];
    if (!e.is_object()) throw SchemaError("encounter " + std::to_string(i) + " must be an object");
    GroundTruthEncounter g;
    g.start_frame = integer(e, "start", 0);
    g.end_frame = integer(e, "end", 0);
    if (g.start_frame < 0 || g.end_frame < g.start_frame) {
      throw SchemaError("encounter " + std::to_string(i) + " has end before start");
    }
    const json& cls = require(e, "class", 0);
    if (!cls.is_string()) throw SchemaError("encounter class must be a string");
    auto parsed = parse_interaction_class(cls.get<std::string>());
    if (!parsed || *parsed == InteractionClass::Unclassified) {
      throw SchemaError("encounter class must be positive, neutral or negative");
    }
    g.cls = *parsed;
    g.n_customers = 1;
    if (e.contains("n")) {
      g.n_customers = static_cast<int>(integer(e, "n", 0));
      if (g.n_customers < 1) throw SchemaError("encounter n must be >= 1");
    }
    gt.encounters.push_back(g);
  }
  return gt;
}

GroundTruth read_annotations_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_annotations(in);
}

void emit_annotations(const GroundTruth& gt, std::ostream& out) {
  ordered_json j;
  if (!gt.video_id.empty()) j["video_id"] = gt.video_id;
  j["customer_count"] = gt.customer_count;
  ordered_json encs = ordered_json::array();
  for (const auto& e : gt.encounters) {
    encs.push_back({{"start", e.start_frame},
                    {"end", e.end_frame},
                    {"class", std::string(to_string(e.cls))},
                    {"n", e.n_customers}});
  }
  j["encounters"] = std::move(encs);
  out << j.dump(2) << '\n';
}

}  // namespace shopsense
