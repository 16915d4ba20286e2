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

// Rule-based encounter classification. Runs after segmentation, once the
// mean encounter duration of the whole set is known.
//
//   Negative  customer hand within threat_dist_m of the employee head
//   Positive  longer than average, and the employee either stepped into the
//             customer area or stood still for most of the encounter
//   Neutral   everything else

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shopsense/encounters.hpp"
#include "shopsense/error.hpp"
#include "shopsense/model.hpp"

namespace shopsense {

struct InteractionParams {
  double threat_dist_m = 0.05;
  double stationary_speed_mps = 0.05;
  double stationary_window_s = 2.0;
  double stationary_fraction = 0.5;
  double neutral_slack = 1.1;
  double visibility_min = kDefaultVisibilityMin;
  bool symmetric_threat = false;  // also test employee hands against customer head

  void validate() const;  // throws ConfigError
  bool operator==(const InteractionParams&) const = default;
};

// Poses of one customer and the employee in the same frame. Either pointer
// may be null when that person has no pose in the frame.
struct PosePair {
  std::int64_t frame = 0;
  const Pose* customer = nullptr;
  const Pose* employee = nullptr;
};

// True iff some evaluable frame has a hand-head distance below
// threat_dist_m. Frames without both poses, or failing the visibility gate,
// are skipped; if none is left a "threat-rule-unevaluable" diagnostic is
// recorded and the result is false.
bool detect_threat(std::span<const PosePair> frames, const Calibration& cal,
                   const InteractionParams& p, Diagnostics* diagnostics = nullptr);

// Frames in [start, end] where both the customer and the employee are
// detected.
std::vector<PosePair> pose_pairs(const Track& customer, const Track& employee,
                                 std::int64_t start, std::int64_t end);

// Whether the employee stood still for at least stationary_fraction of the
// sliding windows over [start, end]. A window is still when the median of
// its frame-to-frame ground speeds is below stationary_speed_mps. Throws
// InsufficientData when the employee is seen in fewer than 2 frames.
bool employee_stationary(const Track& employee, std::int64_t start, std::int64_t end,
                         const Calibration& cal, const InteractionParams& p);

struct ClassificationContext {
  double d_avg_s = 0;
  const Track* employee = nullptr;        // may be null
  std::span<const Track> customers;       // tracks of this encounter
  RoiConfig roi;
  Calibration cal;
};

struct Classification {
  InteractionClass cls = InteractionClass::Unclassified;
  std::string rule;          // which criterion decided
  double pose_duration_s = 0;  // frames with both poses usable, reported only
  Diagnostics diagnostics;
};

Classification classify_encounter(const Encounter& e, const ClassificationContext& ctx,
                                  const InteractionParams& p);

}  // namespace shopsense
