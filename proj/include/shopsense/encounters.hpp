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

// Encounter segmentation and the job-demands aggregate.
//
// Presence mode: one encounter per customer track, entry to exit.
// Proximity mode: frames where a customer stands within d_max of the
// employee; customers engaged at the same time share one encounter.

#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "shopsense/error.hpp"
#include "shopsense/model.hpp"

namespace shopsense {

struct Encounter {
  int id = 0;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;
  double duration_s = 0;
  int n_customers = 1;
  std::set<int> customer_track_ids;
  InteractionClass cls = InteractionClass::Unclassified;

  bool operator==(const Encounter&) const = default;
};

// (end - start + 1) / fps.
double frames_to_seconds(std::int64_t start_frame, std::int64_t end_frame, double fps);

struct JobDemands {
  double T_min = 0;  // analyzed footage
  int C = 0;         // sum of customers over encounters
  std::vector<Encounter> S;
  double D_total_min = 0;
  double D_avg_min = 0;  // 0 when S is empty

  bool operator==(const JobDemands&) const = default;
};

std::vector<Encounter> segment_presence(std::span<const Track> tracks, const Calibration& cal);

struct ProximityParams {
  double d_max_m = 1.5;
  int gap_max = 15;                   // frames bridged inside one engagement
  double employee_coverage_min = 0.9; // below this the result is marked degraded

  void validate() const;
  bool operator==(const ProximityParams&) const = default;
};

struct ProximityResult {
  std::vector<Encounter> encounters;
  bool degraded = false;
  Diagnostics diagnostics;
};

// Throws NoEmployee without an employee track and AmbiguousEmployee with
// more than one. The result is degraded when the employee is missing from
// too many of some customer's frames to trust the distances.
ProximityResult segment_proximity(std::span<const Track> tracks, const Calibration& cal,
                                  const ProximityParams& params = {});

JobDemands aggregate(std::vector<Encounter> encounters, double footage_minutes);

// Checks the aggregate identities and per-encounter invariants; throws
// InvariantViolation.
void verify(const JobDemands& jd, const Calibration& cal);

}  // namespace shopsense
