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

// Scripted shop scenarios rendered into detection streams with exact ground
// truth. Agents are positioned by their foot point (box bottom center) and
// follow a list of legs; everything random is drawn from counter-based
// seeds, so a (spec, noise) pair always yields the same bytes.

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "shopsense/ingest.hpp"
#include "shopsense/model.hpp"

namespace shopsense {

struct Leg {
  enum class Kind { Move, Wait, Hide };
  Kind kind = Kind::Wait;
  Eigen::Vector2d to = Eigen::Vector2d::Zero();  // Move target (foot point)
  double speed = 1.0;                            // Move, px per frame
  std::int64_t frames = 0;                       // Wait / Hide length

  static Leg move(double x, double y, double speed = 1.0) {
    return {Kind::Move, {x, y}, speed, 0};
  }
  static Leg wait(std::int64_t n) { return {Kind::Wait, Eigen::Vector2d::Zero(), 1.0, n}; }
  static Leg hide(std::int64_t n) { return {Kind::Hide, Eigen::Vector2d::Zero(), 1.0, n}; }
  bool operator==(const Leg&) const = default;
};

// Agent raises both hands to `offset_m` above the target agent's nose for
// frames [start, end].
struct PoseEvent {
  std::int64_t start = 0;
  std::int64_t end = 0;
  int target_agent = 0;
  double offset_m = 0.03;
  bool operator==(const PoseEvent&) const = default;
};

struct Appearance {
  std::array<std::uint8_t, 3> rgb{128, 128, 128};
  std::uint64_t embedding_seed = 1;
  bool operator==(const Appearance&) const = default;
};

struct AgentSpec {
  Role role = Role::Customer;
  std::int64_t entry_frame = 0;
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
  double width = 60;
  double height = 150;
  std::vector<Leg> legs;
  Appearance appearance;
  std::vector<PoseEvent> pose_events;
  InteractionClass gt_class = InteractionClass::Neutral;  // customers only
  bool operator==(const AgentSpec&) const = default;
};

struct Layout {
  Calibration cal{15.0, 0.01, 640, 480};
  double roi_y = 240;
  Eigen::Vector2d counter{320, 300};
  Eigen::Vector2d entrance{600, 460};
  bool operator==(const Layout&) const = default;
};

using FrameRange = std::pair<std::int64_t, std::int64_t>;  // inclusive

struct NoiseSpec {
  double miss_prob = 0;
  double jitter_px = 0;
  double occlusion_iou = 1.0;  // rear box dropped above this overlap; 1 disables
  std::vector<FrameRange> employee_dropout;
  std::vector<FrameRange> employee_pose_dropout;
  std::uint64_t seed = 0;

  void validate() const;  // throws SpecError
  bool operator==(const NoiseSpec&) const = default;
};

struct ScenarioSpec {
  std::string name;
  Layout layout;
  std::int64_t duration_frames = 0;
  int embedding_dim = 128;
  int patch_width = 8;
  int patch_height = 16;
  bool emit_embeddings = true;
  bool emit_patches = true;
  bool emit_poses = true;
  double embedding_noise = 0.02;  // norm of the per-frame perturbation
  std::vector<AgentSpec> agents;
  NoiseSpec noise;  // the scenario's default degradation

  void validate() const;  // throws SpecError
  bool operator==(const ScenarioSpec&) const = default;
};

struct Scenario {
  DetectionStream stream;
  GroundTruth truth;
};

Scenario generate(const ScenarioSpec& spec, const NoiseSpec& noise);
inline Scenario generate(const ScenarioSpec& spec) { return generate(spec, spec.noise); }

// Foot point per frame while visible; frames are absolute.
struct AgentPath {
  std::vector<std::int64_t> frames;
  std::vector<Eigen::Vector2d> feet;
};
AgentPath agent_path(const AgentSpec& agent, std::int64_t duration_frames);

std::vector<std::string> builtin_names();
// Throws SpecError for unknown names.
ScenarioSpec builtin_scenario(const std::string& name);

std::string scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const std::string& text);

}  // namespace shopsense
