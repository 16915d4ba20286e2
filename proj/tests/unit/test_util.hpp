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

// Small builders and a seeded generator shared by the unit tests.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "shopsense/model.hpp"

namespace shopsense::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool coin(double p = 0.5) { return uniform(0, 1) < p; }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline Detection det(std::int64_t frame, double cx, double cy, double w = 40, double h = 100,
                     double conf = 0.9) {
  Detection d;
  d.frame_index = frame;
  d.bbox = BBox(cx, cy, w, h);
  d.confidence = conf;
  return d;
}

// Box whose bottom edge sits at y2.
inline Detection foot(std::int64_t frame, double x, double y2, double w = 40, double h = 100) {
  return det(frame, x, y2 - h / 2, w, h);
}

inline Track track(int id, Role role, std::vector<Detection> dets) {
  Track t;
  t.track_id = id;
  t.role = role;
  t.detections = std::move(dets);
  return t;
}

// Track standing still with its feet at (x, y2) over [first, last].
inline Track still(int id, Role role, std::int64_t first, std::int64_t last, double x, double y2) {
  std::vector<Detection> dets;
  for (std::int64_t f = first; f <= last; ++f) dets.push_back(foot(f, x, y2));
  return track(id, role, std::move(dets));
}

inline Pose figure(double nose_x, double nose_y, double hand_x, double hand_y,
                   double visibility = 0.9) {
  Pose p;
  for (auto& k : p.keypoints) k = {nose_x, nose_y + 50, visibility};
  p[landmark::kNose] = {nose_x, nose_y, visibility};
  p[landmark::kLeftEyeOuter] = {nose_x - 5, nose_y - 2, visibility};
  p[landmark::kLeftIndex] = {hand_x, hand_y, visibility};
  p[landmark::kRightIndex] = {hand_x + 10, hand_y, visibility};
  return p;
}

}  // namespace shopsense::testing
