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

#include "shopsense/interactions.hpp"

#include <algorithm>
#include <cmath>

namespace shopsense {

void InteractionParams::validate() const {
  if (!(threat_dist_m > 0)) throw ConfigError("interactions.threat_dist_m must be > 0");
  if (!(stationary_speed_mps > 0)) throw ConfigError("interactions.stationary_speed_mps must be > 0");
  if (!(stationary_window_s > 0)) throw ConfigError("interactions.stationary_window_s must be > 0");
  if (!(stationary_fraction > 0 && stationary_fraction <= 1)) {
    throw ConfigError("interactions.stationary_fraction must be in (0,1]");
  }
  if (!(neutral_slack >= 1)) throw ConfigError("interactions.neutral_slack must be >= 1");
  if (!(visibility_min >= 0 && visibility_min <= 1)) {
    throw ConfigError("interactions.visibility_min must be in [0,1]");
  }
}

bool detect_threat(std::span<const PosePair> frames, const Calibration& cal,
                   const InteractionParams& p, Diagnostics* diagnostics) {
  std::size_t evaluated = 0;
  for (const PosePair& f : frames) {
    if (!f.customer || !f.employee) continue;
    auto d = try_hand_head_distance_m(*f.customer, *f.employee, cal, p.visibility_min);
    if (p.symmetric_threat) {
      const auto back = try_hand_head_distance_m(*f.employee, *f.customer, cal, p.visibility_min);
      if (back && (!d || *back < *d)) d = back;
    }
    if (!d) continue;
    ++evaluated;
    if (*d < p.threat_dist_m) return true;
  }
  if (evaluated == 0) {
    note(diagnostics, "threat-rule-unevaluable", "no frame with usable poses for both parties");
  }
  return false;
}

std::vector<PosePair> pose_pairs(const Track& customer, const Track& employee, std::int64_t start,
                                 std::int64_t end) {
  std::vector<PosePair> out;
  for (const Detection& c : customer.detections) {
    if (c.frame_index < start || c.frame_index > end) continue;
    const Detection* e = employee.at_frame(c.frame_index);
    if (!e) continue;
    out.push_back({c.frame_index, c.pose ? &*c.pose : nullptr, e->pose ? &*e->pose : nullptr});
  }
  return out;
}

namespace {

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2;
}

}  // namespace

bool employee_stationary(const Track& employee, std::int64_t start, std::int64_t end,
                         const Calibration& cal, const InteractionParams& p) {
  std::vector<const Detection*> seen;
  for (const Detection& d : employee.detections) {
    if (d.frame_index >= start && d.frame_index <= end) seen.push_back(&d);
  }
  if (seen.size() < 2) throw InsufficientData("employee seen in fewer than 2 encounter frames");

  // Speed samples keyed by the later frame of each consecutive pair.
  std::vector<std::int64_t> at;
  std::vector<double> speed;
  for (std::size_t i = 1; i < seen.size(); ++i) {
    const double dt = static_cast<double>(seen[i]->frame_index - seen[i - 1]->frame_index) / cal.fps;
    at.push_back(seen[i]->frame_index);
    speed.push_back(ground_distance_m(seen[i]->bbox, seen[i - 1]->bbox, cal) / dt);
  }

  const std::int64_t window =
      std::max<std::int64_t>(2, std::llround(p.stationary_window_s * cal.fps));
  const std::int64_t last_start = std::max(start, end - window + 1);
  std::size_t evaluated = 0, still = 0;
  std::size_t lo = 0, hi = 0;
  for (std::int64_t a = start; a <= last_start; ++a) {
    const std::int64_t b = a + window - 1;
    // Samples strictly after the window start, so both endpoints lie inside.
    while (lo < at.size() && at[lo] <= a) ++lo;
    while (hi < at.size() && at[hi] <= b) ++hi;
    if (hi <= lo) continue;
    std::vector<double> in(speed.begin() + static_cast<std::ptrdiff_t>(lo),
                           speed.begin() + static_cast<std::ptrdiff_t>(hi));
    ++evaluated;
    if (median(std::move(in)) < p.stationary_speed_mps) ++still;
  }
  if (evaluated == 0) throw InsufficientData("no stationarity window could be evaluated");
  return static_cast<double>(still) >= p.stationary_fraction * static_cast<double>(evaluated);
}

Classification classify_encounter(const Encounter& e, const ClassificationContext& ctx,
                                  const InteractionParams& p) {
  Classification out;
  std::vector<PosePair> pairs;
  if (ctx.employee) {
    for (const Track& c : ctx.customers) {
      auto more = pose_pairs(c, *ctx.employee, e.start_frame, e.end_frame);
      pairs.insert(pairs.end(), more.begin(), more.end());
    }
  }
  std::size_t usable = 0;
  for (const PosePair& f : pairs) {
    if (f.customer && f.employee &&
        try_hand_head_distance_m(*f.customer, *f.employee, ctx.cal, p.visibility_min)) {
      ++usable;
    }
  }
  out.pose_duration_s = static_cast<double>(usable) / ctx.cal.fps;

  if (detect_threat(pairs, ctx.cal, p, &out.diagnostics)) {
    out.cls = InteractionClass::Negative;
    out.rule = "threat";
    return out;
  }

  const double d = e.duration_s, avg = ctx.d_avg_s;
  const bool longer = d > avg * (1.0 + 1e-9);
  if (!longer) {
    out.cls = InteractionClass::Neutral;
    out.rule = "short";
    return out;
  }

  auto fallback = [&](const std::string& why) {
    note(&out.diagnostics, "duration-only", why);
    out.cls = InteractionClass::Positive;
    out.rule = "duration-only";
  };
  if (!ctx.employee) {
    fallback("no employee track; classified by duration alone");
    return out;
  }
  for (const Detection& det : ctx.employee->detections) {
    if (det.frame_index < e.start_frame || det.frame_index > e.end_frame) continue;
    if (det.bbox.y2() >= ctx.roi.y_line) {
      out.cls = InteractionClass::Positive;
      out.rule = "employee-in-customer-area";
      return out;
    }
  }
  try {
    if (employee_stationary(*ctx.employee, e.start_frame, e.end_frame, ctx.cal, p)) {
      out.cls = InteractionClass::Positive;
      out.rule = "employee-stationary";
      return out;
    }
  } catch (const InsufficientData& err) {
    fallback(err.what());
    return out;
  }
  out.cls = InteractionClass::Neutral;
  out.rule = "long-no-engagement";
  if (d > p.neutral_slack * avg) {
    note(&out.diagnostics, "long-neutral",
         "longer than the neutral slack without employee engagement");
  }
  return out;
}

}  // namespace shopsense
