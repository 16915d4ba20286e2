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

#include "shopsense/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace shopsense {

BBox::BBox(double cx, double cy, double w, double h) : cx_(cx), cy_(cy), w_(w), h_(h) {
  if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(w) || !std::isfinite(h)) {
    throw InvalidValue("bbox values must be finite");
  }
  if (!(w > 0) || !(h > 0)) {
    throw InvalidValue("bbox needs w > 0 and h > 0, got w=" + std::to_string(w) +
                       " h=" + std::to_string(h));
  }
}

BBox BBox::from_corners(double x1, double y1, double x2, double y2) {
  return BBox((x1 + x2) / 2, (y1 + y2) / 2, x2 - x1, y2 - y1);
}

bool Detection::operator==(const Detection& other) const {
  if (frame_index != other.frame_index || !(bbox == other.bbox) ||
      confidence != other.confidence || patch != other.patch || pose != other.pose) {
    return false;
  }
  if (embedding.has_value() != other.embedding.has_value()) return false;
  if (!embedding) return true;
  return embedding->size() == other.embedding->size() && *embedding == *other.embedding;
}

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::Customer: return "customer";
    case Role::Employee: return "employee";
    case Role::Unknown: break;
  }
  return "unknown";
}

std::string_view to_string(InteractionClass c) noexcept {
  switch (c) {
    case InteractionClass::Positive: return "positive";
    case InteractionClass::Neutral: return "neutral";
    case InteractionClass::Negative: return "negative";
    case InteractionClass::Unclassified: break;
  }
  return "unclassified";
}

std::optional<InteractionClass> parse_interaction_class(std::string_view s) noexcept {
  for (auto c : {InteractionClass::Positive, InteractionClass::Neutral,
                 InteractionClass::Negative, InteractionClass::Unclassified}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

const Detection* Track::at_frame(std::int64_t frame) const {
  auto it = std::lower_bound(
      detections.begin(), detections.end(), frame,
      [](const Detection& d, std::int64_t f) { return d.frame_index < f; });
  return (it != detections.end() && it->frame_index == frame) ? &*it : nullptr;
}

void validate(const Track& track) {
  if (track.detections.empty()) {
    throw InvalidValue("track " + std::to_string(track.track_id) + " has no detections");
  }
  for (std::size_t i = 1; i < track.detections.size(); ++i) {
    if (track.detections[i].frame_index <= track.detections[i - 1].frame_index) {
      throw InvalidValue("track " + std::to_string(track.track_id) +
                         " frame indices not strictly increasing");
    }
  }
}

std::size_t absorb(Track& into, const Track& from) {
  std::vector<Detection> merged;
  merged.reserve(into.detections.size() + from.detections.size());
  std::size_t dropped = 0;
  auto a = into.detections.begin();
  auto b = from.detections.begin();
  while (a != into.detections.end() || b != from.detections.end()) {
    if (b == from.detections.end() ||
        (a != into.detections.end() && a->frame_index < b->frame_index)) {
      merged.push_back(std::move(*a++));
    } else if (a == into.detections.end() || b->frame_index < a->frame_index) {
      merged.push_back(*b++);
    } else {
      if (b->confidence > a->confidence) {
        merged.push_back(*b);
      } else {
        merged.push_back(std::move(*a));
      }
      ++a;
      ++b;
      ++dropped;
    }
  }
  into.detections = std::move(merged);
  into.merged_from.insert(from.track_id);
  into.merged_from.insert(from.merged_from.begin(), from.merged_from.end());
  return dropped;
}

std::size_t shared_frames(const Track& a, const Track& b) {
  std::size_t n = 0;
  auto i = a.detections.begin();
  auto j = b.detections.begin();
  while (i != a.detections.end() && j != b.detections.end()) {
    if (i->frame_index < j->frame_index) {
      ++i;
    } else if (j->frame_index < i->frame_index) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

void Calibration::validate() const {
  if (!(fps > 0) || !std::isfinite(fps)) throw CalibrationError("fps must be > 0");
  if (!(meters_per_pixel > 0) || !std::isfinite(meters_per_pixel)) {
    throw CalibrationError("meters_per_pixel must be > 0");
  }
  if (frame_width <= 0 || frame_height <= 0) {
    throw CalibrationError("frame dimensions must be > 0");
  }
}

void RoiConfig::validate(const Calibration& cal) const {
  if (!(y_line > 0) || !(y_line < cal.frame_height)) {
    throw CalibrationError("roi line must lie strictly inside the frame");
  }
  if (employee_capacity < 1) throw CalibrationError("employee_capacity must be >= 1");
}

double iou(const BBox& a, const BBox& b) noexcept {
  const double iw = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
  const double ih = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

double ground_distance_m(const BBox& a, const BBox& b, const Calibration& cal) noexcept {
  return (a.bottom_center() - b.bottom_center()).norm() * cal.meters_per_pixel;
}

std::optional<double> try_hand_head_distance_m(const Pose& customer, const Pose& employee,
                                               const Calibration& cal,
                                               double visibility_min) noexcept {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t hand : landmark::kHands) {
    const Keypoint& p = customer[hand];
    if (p.visibility < visibility_min) return std::nullopt;
    for (std::size_t head : landmark::kHead) {
      const Keypoint& q = employee[head];
      if (q.visibility < visibility_min) return std::nullopt;
      best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
    }
  }
  return best * cal.meters_per_pixel;
}

double hand_head_distance_m(const Pose& customer, const Pose& employee,
                            const Calibration& cal, double visibility_min) {
  if (auto d = try_hand_head_distance_m(customer, employee, cal, visibility_min)) return *d;
  throw LowVisibility("hand/head landmark below visibility threshold");
}

}  // namespace shopsense
