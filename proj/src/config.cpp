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

#include "shopsense/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json_util.hpp"

namespace shopsense {

std::string_view to_string(SegmentationMode m) noexcept {
  return m == SegmentationMode::Proximity ? "proximity" : "presence";
}

std::optional<SegmentationMode> parse_segmentation_mode(std::string_view s) noexcept {
  if (s == "presence") return SegmentationMode::Presence;
  if (s == "proximity") return SegmentationMode::Proximity;
  return std::nullopt;
}

void RunConfig::validate() const {
  tracker.validate();
  reid.validate();
  proximity.validate();
  interactions.validate();
  if (employee_capacity < 1) throw ConfigError("employee_capacity must be >= 1");
  if (!(tiou_min > 0 && tiou_min <= 1)) throw ConfigError("tiou_min must be in (0,1]");
  if (fps && !(*fps > 0)) throw ConfigError("fps override must be > 0");
  if (meters_per_pixel && !(*meters_per_pixel > 0)) {
    throw ConfigError("meters_per_pixel override must be > 0");
  }
}

namespace {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;
using detail::read_opt;
using detail::reject_unknown;
using Keys = std::initializer_list<const char*>;

ojson noise_json(const KalmanNoise<double>& n) {
  return {{"position", n.position},
          {"velocity", n.velocity},
          {"area", n.area},
          {"area_velocity", n.area_velocity},
          {"aspect", n.aspect},
          {"measurement", n.measurement},
          {"measurement_area", n.measurement_area},
          {"measurement_aspect", n.measurement_aspect},
          {"initial_velocity", n.initial_velocity},
          {"initial_area_velocity", n.initial_area_velocity}};
}

void read_noise(const json& j, KalmanNoise<double>& n) {
  const std::string w = "tracker.kalman";
  reject_unknown(j,
                 Keys{"position", "velocity", "area", "area_velocity", "aspect", "measurement",
                      "measurement_area", "measurement_aspect", "initial_velocity",
                      "initial_area_velocity"},
                 w);
  read_opt(j, "position", n.position, w);
  read_opt(j, "velocity", n.velocity, w);
  read_opt(j, "area", n.area, w);
  read_opt(j, "area_velocity", n.area_velocity, w);
  read_opt(j, "aspect", n.aspect, w);
  read_opt(j, "measurement", n.measurement, w);
  read_opt(j, "measurement_area", n.measurement_area, w);
  read_opt(j, "measurement_aspect", n.measurement_aspect, w);
  read_opt(j, "initial_velocity", n.initial_velocity, w);
  read_opt(j, "initial_area_velocity", n.initial_area_velocity, w);
}

template <typename T>
ojson optional_json(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  T v{};
  read_opt(j, key, v, "overrides");
  out = v;
}

}  // namespace

std::string config_to_json(const RunConfig& c) {
  ojson j;
  const TrackerParams& t = c.tracker;
  j["tracker"] = {{"iou_min", t.iou_min},
                  {"max_age", t.max_age},
                  {"min_hits", t.min_hits},
                  {"appearance_weight", t.appearance_weight},
                  {"confidence_min", t.confidence_min},
                  {"mahalanobis_gating", t.mahalanobis_gating},
                  {"gating_threshold", t.gating_threshold},
                  {"kalman", noise_json(t.noise)}};
  const ReidParams& r = c.reid;
  j["reid"] = {{"enabled", c.reid_enabled},
               {"w_cnn", r.weights.cnn},
               {"w_hog", r.weights.hog},
               {"w_color", r.weights.color},
               {"threshold", r.weights.threshold},
               {"overlap_max", r.overlap_max},
               {"max_feature_samples", r.max_feature_samples},
               {"max_color_pixels", r.max_color_pixels},
               {"color_k", r.color_k},
               {"kmeans_seed", r.kmeans.seed},
               {"kmeans_max_iterations", r.kmeans.max_iterations},
               {"kmeans_tolerance", r.kmeans.tolerance}};
  j["roles"] = {{"employee_capacity", c.employee_capacity}};
  j["segmentation"] = {{"mode", std::string(to_string(c.mode))},
                       {"d_max_m", c.proximity.d_max_m},
                       {"gap_max", c.proximity.gap_max},
                       {"employee_coverage_min", c.proximity.employee_coverage_min}};
  const InteractionParams& p = c.interactions;
  j["interactions"] = {{"threat_dist_m", p.threat_dist_m},
                       {"stationary_speed_mps", p.stationary_speed_mps},
                       {"stationary_window_s", p.stationary_window_s},
                       {"stationary_fraction", p.stationary_fraction},
                       {"neutral_slack", p.neutral_slack},
                       {"visibility_min", p.visibility_min},
                       {"symmetric_threat", p.symmetric_threat}};
  j["evaluation"] = {{"tiou_min", c.tiou_min}};
  j["overrides"] = {{"fps", optional_json(c.fps)},
                    {"meters_per_pixel", optional_json(c.meters_per_pixel)},
                    {"roi_y", optional_json(c.roi_y)}};
  return j.dump(2) + "\n";
}

RunConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  RunConfig c;
  reject_unknown(j, Keys{"tracker", "reid", "roles", "segmentation", "interactions", "evaluation",
                         "overrides"},
                 "config");
  if (auto it = j.find("tracker"); it != j.end()) {
    const std::string w = "tracker";
    reject_unknown(*it,
                   Keys{"iou_min", "max_age", "min_hits", "appearance_weight", "confidence_min",
                        "mahalanobis_gating", "gating_threshold", "kalman"},
                   w);
    TrackerParams& t = c.tracker;
    read_opt(*it, "iou_min", t.iou_min, w);
    read_opt(*it, "max_age", t.max_age, w);
    read_opt(*it, "min_hits", t.min_hits, w);
    read_opt(*it, "appearance_weight", t.appearance_weight, w);
    read_opt(*it, "confidence_min", t.confidence_min, w);
    read_opt(*it, "mahalanobis_gating", t.mahalanobis_gating, w);
    read_opt(*it, "gating_threshold", t.gating_threshold, w);
    if (auto k = it->find("kalman"); k != it->end()) read_noise(*k, t.noise);
  }
  if (auto it = j.find("reid"); it != j.end()) {
    const std::string w = "reid";
    reject_unknown(*it,
                   Keys{"enabled", "w_cnn", "w_hog", "w_color", "threshold", "overlap_max",
                        "max_feature_samples", "max_color_pixels", "color_k", "kmeans_seed",
                        "kmeans_max_iterations", "kmeans_tolerance"},
                   w);
    ReidParams& r = c.reid;
    read_opt(*it, "enabled", c.reid_enabled, w);
    read_opt(*it, "w_cnn", r.weights.cnn, w);
    read_opt(*it, "w_hog", r.weights.hog, w);
    read_opt(*it, "w_color", r.weights.color, w);
    read_opt(*it, "threshold", r.weights.threshold, w);
    read_opt(*it, "overlap_max", r.overlap_max, w);
    read_opt(*it, "max_feature_samples", r.max_feature_samples, w);
    read_opt(*it, "max_color_pixels", r.max_color_pixels, w);
    read_opt(*it, "color_k", r.color_k, w);
    read_opt(*it, "kmeans_seed", r.kmeans.seed, w);
    read_opt(*it, "kmeans_max_iterations", r.kmeans.max_iterations, w);
    read_opt(*it, "kmeans_tolerance", r.kmeans.tolerance, w);
  }
  if (auto it = j.find("roles"); it != j.end()) {
    reject_unknown(*it, Keys{"employee_capacity"}, "roles");
    read_opt(*it, "employee_capacity", c.employee_capacity, "roles");
  }
  if (auto it = j.find("segmentation"); it != j.end()) {
    const std::string w = "segmentation";
    reject_unknown(*it, Keys{"mode", "d_max_m", "gap_max", "employee_coverage_min"}, w);
    std::string mode(to_string(c.mode));
    read_opt(*it, "mode", mode, w);
    auto parsed = parse_segmentation_mode(mode);
    if (!parsed) throw ConfigError("segmentation.mode must be presence or proximity");
    c.mode = *parsed;
    read_opt(*it, "d_max_m", c.proximity.d_max_m, w);
    read_opt(*it, "gap_max", c.proximity.gap_max, w);
    read_opt(*it, "employee_coverage_min", c.proximity.employee_coverage_min, w);
  }
  if (auto it = j.find("interactions"); it != j.end()) {
    const std::string w = "interactions";
    reject_unknown(*it,
                   Keys{"threat_dist_m", "stationary_speed_mps", "stationary_window_s",
                        "stationary_fraction", "neutral_slack", "visibility_min",
                        "symmetric_threat"},
                   w);
    InteractionParams& p = c.interactions;
    read_opt(*it, "threat_dist_m", p.threat_dist_m, w);
    read_opt(*it, "stationary_speed_mps", p.stationary_speed_mps, w);
    read_opt(*it, "stationary_window_s", p.stationary_window_s, w);
    read_opt(*it, "stationary_fraction", p.stationary_fraction, w);
    read_opt(*it, "neutral_slack", p.neutral_slack, w);
    read_opt(*it, "visibility_min", p.visibility_min, w);
    read_opt(*it, "symmetric_threat", p.symmetric_threat, w);
  }
  if (auto it = j.find("evaluation"); it != j.end()) {
    reject_unknown(*it, Keys{"tiou_min"}, "evaluation");
    read_opt(*it, "tiou_min", c.tiou_min, "evaluation");
  }
  if (auto it = j.find("overrides"); it != j.end()) {
    reject_unknown(*it, Keys{"fps", "meters_per_pixel", "roi_y"}, "overrides");
    read_optional(*it, "fps", c.fps);
    read_optional(*it, "meters_per_pixel", c.meters_per_pixel);
    read_optional(*it, "roi_y", c.roi_y);
  }
  c.validate();
  return c;
}

RunConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

}  // namespace shopsense
