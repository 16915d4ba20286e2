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

#include "shopsense/encounters.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shopsense/roles.hpp"

namespace shopsense {

double frames_to_seconds(std::int64_t start_frame, std::int64_t end_frame, double fps) {
  return static_cast<double>(end_frame - start_frame + 1) / fps;
}

namespace {

void number(std::vector<Encounter>& es) {
  std::stable_sort(es.begin(), es.end(), [](const Encounter& a, const Encounter& b) {
    if (a.start_frame != b.start_frame) return a.start_frame < b.start_frame;
    return a.end_frame < b.end_frame;
  });
  for (std::size_t i = 0; i < es.size(); ++i) es[i].id = static_cast<int>(i) + 1;
}

}  // namespace

std::vector<Encounter> segment_presence(std::span<const Track> tracks, const Calibration& cal) {
  std::vector<Encounter> out;
  for (const Track& t : tracks) {
    if (t.role != Role::Customer || t.detections.empty()) continue;
    Encounter e;
    e.start_frame = t.first_frame();
    e.end_frame = t.last_frame();
    e.duration_s = frames_to_seconds(e.start_frame, e.end_frame, cal.fps);
    e.customer_track_ids = {t.track_id};
    e.n_customers = 1;
    out.push_back(std::move(e));
  }
  number(out);
  return out;
}

void ProximityParams::validate() const {
  if (!(d_max_m > 0)) throw ConfigError("proximity.d_max_m must be > 0");
  if (gap_max < 0) throw ConfigError("proximity.gap_max must be >= 0");
  if (!(employee_coverage_min >= 0 && employee_coverage_min <= 1)) {
    throw ConfigError("proximity.employee_coverage_min must be in [0,1]");
  }
}

ProximityResult segment_proximity(std::span<const Track> tracks, const Calibration& cal,
                                  const ProximityParams& params) {
  params.validate();
  const Track* employee = find_employee(tracks);
  if (!employee) throw NoEmployee("proximity segmentation needs an employee track");

  struct Interval {
    std::int64_t start, end;
    int customer;
  };
  ProximityResult result;
  std::vector<Interval> intervals;
  for (const Track& t : tracks) {
    if (t.role != Role::Customer) continue;
    std::size_t covered = 0;
    std::vector<std::int64_t> engaged;
    for (const Detection& d : t.detections) {
      const Detection* e = employee->at_frame(d.frame_index);
      if (!e) continue;
      ++covered;
      if (ground_distance_m(d.bbox, e->bbox, cal) < params.d_max_m) engaged.push_back(d.frame_index);
    }
    const double coverage =
        t.detections.empty() ? 1.0 : static_cast<double>(covered) / t.detections.size();
    if (coverage < params.employee_coverage_min) {
      result.degraded = true;
      note(&result.diagnostics, "employee-coverage",
           "employee visible in " + std::to_string(covered) + " of " +
               std::to_string(t.detections.size()) + " frames of customer track " +
               std::to_string(t.track_id));
    }
    for (std::size_t i = 0; i < engaged.size();) {
      std::size_t j = i;
      while (j + 1 < engaged.size() && engaged[j + 1] - engaged[j] - 1 <= params.gap_max) ++j;
      intervals.push_back({engaged[i], engaged[j], t.track_id});
      i = j + 1;
    }
  }

  std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end < b.end;
    return a.customer < b.customer;
  });
  for (const Interval& iv : intervals) {
    if (!result.encounters.empty() && iv.start <= result.encounters.back().end_frame) {
      Encounter& cur = result.encounters.back();
      cur.end_frame = std::max(cur.end_frame, iv.end);
      cur.customer_track_ids.insert(iv.customer);
      continue;
    }
    Encounter e;
    e.start_frame = iv.start;
    e.end_frame = iv.end;
    e.customer_track_ids = {iv.customer};
    result.encounters.push_back(std::move(e));
  }
  for (Encounter& e : result.encounters) {
    e.n_customers = static_cast<int>(e.customer_track_ids.size());
    e.duration_s = frames_to_seconds(e.start_frame, e.end_frame, cal.fps);
  }
  number(result.encounters);
  return result;
}

JobDemands aggregate(std::vector<Encounter> encounters, double footage_minutes) {
  JobDemands jd;
  jd.T_min = footage_minutes;
  double total_s = 0;
  for (const Encounter& e : encounters) {
    jd.C += e.n_customers;
    total_s += e.duration_s;
  }
  jd.D_total_min = total_s / 60.0;
  jd.D_avg_min = encounters.empty() ? 0.0 : jd.D_total_min / static_cast<double>(encounters.size());
  jd.S = std::move(encounters);
  return jd;
}

void verify(const JobDemands& jd, const Calibration& cal) {
  int c = 0;
  double total_s = 0;
  for (const Encounter& e : jd.S) {
    if (e.n_customers < 1 || static_cast<std::size_t>(e.n_customers) != e.customer_track_ids.size()) {
      throw InvariantViolation("encounter " + std::to_string(e.id) + ": n != |customers|");
    }
    if (e.end_frame < e.start_frame) {
      throw InvariantViolation("encounter " + std::to_string(e.id) + ": end before start");
    }
    if (e.duration_s != frames_to_seconds(e.start_frame, e.end_frame, cal.fps)) {
      throw InvariantViolation("encounter " + std::to_string(e.id) + ": duration off frame count");
    }
    c += e.n_customers;
    total_s += e.duration_s;
  }
  if (c != jd.C) throw InvariantViolation("C != sum of n_i");
  if (total_s / 60.0 != jd.D_total_min) throw InvariantViolation("D_total != sum of durations");
  const double lhs = jd.D_avg_min * static_cast<double>(jd.S.size());
  if (std::abs(lhs - jd.D_total_min) > 1e-9 * std::max(1.0, std::abs(jd.D_total_min))) {
    throw InvariantViolation("D_avg * |S| != D_total");
  }
}

}  // namespace shopsense
