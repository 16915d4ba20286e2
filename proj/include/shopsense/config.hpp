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

// Run configuration: every tunable of every stage, loadable from JSON.
// Unknown keys are rejected so a typo never silently falls back to a default.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "shopsense/encounters.hpp"
#include "shopsense/interactions.hpp"
#include "shopsense/reid.hpp"
#include "shopsense/tracker.hpp"

namespace shopsense {

enum class SegmentationMode { Presence, Proximity };

std::string_view to_string(SegmentationMode m) noexcept;
std::optional<SegmentationMode> parse_segmentation_mode(std::string_view s) noexcept;

struct RunConfig {
  TrackerParams tracker;
  bool reid_enabled = true;
  ReidParams reid;
  int employee_capacity = 1;
  SegmentationMode mode = SegmentationMode::Presence;
  ProximityParams proximity;
  InteractionParams interactions;
  double tiou_min = 0.3;  // evaluation matching threshold

  // Overrides applied on top of the stream header.
  std::optional<double> fps;
  std::optional<double> meters_per_pixel;
  std::optional<double> roi_y;

  void validate() const;  // throws ConfigError
  bool operator==(const RunConfig&) const = default;
};

std::string config_to_json(const RunConfig& c);
RunConfig config_from_json(std::string_view text);  // throws ConfigError
RunConfig read_config_file(const std::filesystem::path& path);

}  // namespace shopsense
