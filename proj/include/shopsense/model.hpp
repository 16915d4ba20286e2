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

// Domain values shared by every stage: boxes, poses, detections, tracks and
// the camera calibration they are measured in.

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "shopsense/error.hpp"

namespace shopsense {

// Axis-aligned person box in pixel coordinates, stored by center and size.
// Corners are always derived.
class BBox {
 public:
  // Throws InvalidValue unless w > 0, h > 0 and all values are finite.
  BBox(double cx, double cy, double w, double h);

  static BBox from_corners(double x1, double y1, double x2, double y2);

  double cx() const noexcept { return cx_; }
  double cy() const noexcept { return cy_; }
  double w() const noexcept { return w_; }
  double h() const noexcept { return h_; }

  double x1() const noexcept { return cx_ - w_ / 2; }
  double x2() const noexcept { return cx_ + w_ / 2; }
  double y1() const noexcept { return cy_ - h_ / 2; }
  // Bottom edge; used for staff/customer area decisions.
  double y2() const noexcept { return cy_ + h_ / 2; }
  double area() const noexcept { return w_ * h_; }

  // Feet proxy used for ground distances.
  Eigen::Vector2d bottom_center() const noexcept { return {cx_, y2()}; }

  bool operator==(const BBox&) const = default;

 private:
  double cx_, cy_, w_, h_;
};

struct Keypoint {
  double x = 0;
  double y = 0;
  double visibility = 0;
  bool operator==(const Keypoint&) const = default;
};

inline constexpr std::size_t kPoseKeypoints = 33;

// Landmark indices used by the interaction rules.
namespace landmark {
inline constexpr std::size_t kNose = 0;
inline constexpr std::size_t kLeftEyeOuter = 3;
inline constexpr std::size_t kLeftIndex = 19;
inline constexpr std::size_t kRightIndex = 20;
inline constexpr std::array<std::size_t, 2> kHead = {kNose, kLeftEyeOuter};
inline constexpr std::array<std::size_t, 2> kHands = {kLeftIndex, kRightIndex};
}  // namespace landmark

// 33-point body landmark set. The arity is fixed by the type.
struct Pose {
  std::array<Keypoint, kPoseKeypoints> keypoints{};

  Keypoint& operator[](std::size_t i) { return keypoints[i]; }
  const Keypoint& operator[](std::size_t i) const { return keypoints[i]; }
  bool operator==(const Pose&) const = default;
};

// Interleaved 8-bit RGB raster, row-major.
struct RgbPatch {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  bool empty() const noexcept { return width <= 0 || height <= 0; }
  std::size_t pixel_count() const noexcept {
    return empty() ? 0 : static_cast<std::size_t>(width) * height;
  }
  const std::uint8_t* pixel(int x, int y) const {
    return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  bool operator==(const RgbPatch&) const = default;
};

struct Detection {
  std::int64_t frame_index = 0;
  BBox bbox{0, 0, 1, 1};
  double confidence = 1.0;
  std::optional<Eigen::VectorXd> embedding;  // unit norm when present
  std::optional<RgbPatch> patch;
  std::optional<Pose> pose;

  bool operator==(const Detection& other) const;
};

enum class Role { Unknown, Customer, Employee };

std::string_view to_string(Role role) noexcept;

// Nature of a customer-employee encounter.
enum class InteractionClass { Positive, Neutral, Negative, Unclassified };

std::string_view to_string(InteractionClass c) noexcept;
// Accepts "positive", "neutral", "negative", "unclassified".
std::optional<InteractionClass> parse_interaction_class(std::string_view s) noexcept;

struct Track {
  int track_id = 0;
  Role role = Role::Unknown;
  std::vector<Detection> detections;  // strictly increasing frame_index
  std::set<int> merged_from;

  std::int64_t first_frame() const { return detections.front().frame_index; }
  std::int64_t last_frame() const { return detections.back().frame_index; }
  // Detection observed in `frame`, or nullptr.
  const Detection* at_frame(std::int64_t frame) const;

  bool operator==(const Track&) const = default;
};

// Throws InvalidValue if detections are empty or not strictly increasing.
void validate(const Track& track);

// Moves every detection of `from` into `into`. Where both tracks hold a
// detection for the same frame, the higher-confidence one survives (ties keep
// `into`). Returns the number of detections dropped by such conflicts.
std::size_t absorb(Track& into, const Track& from);

// Number of frames in which both tracks have a detection.
std::size_t shared_frames(const Track& a, const Track& b);

struct Calibration {
  double fps = 15.0;
  double meters_per_pixel = 0.005;
  int frame_width = 640;
  int frame_height = 480;

  // Throws CalibrationError when any field is nonpositive.
  void validate() const;
  bool operator==(const Calibration&) const = default;
};

struct RoiConfig {
  double y_line = 240.0;  // dividing line; staff area is y2 < y_line
  int employee_capacity = 1;

  void validate(const Calibration& cal) const;
  bool operator==(const RoiConfig&) const = default;
};

inline constexpr double kDefaultVisibilityMin = 0.5;

double iou(const BBox& a, const BBox& b) noexcept;

// Distance between the bottom-center points of `a` and `b`, in meters.
double ground_distance_m(const BBox& a, const BBox& b, const Calibration& cal) noexcept;

// Minimum distance from either customer hand (19, 20) to either employee head
// landmark (0, 3), in meters. Throws LowVisibility when any of those
// landmarks is below `visibility_min`.
double hand_head_distance_m(const Pose& customer, const Pose& employee,
                            const Calibration& cal,
                            double visibility_min = kDefaultVisibilityMin);

// Same as hand_head_distance_m, but nullopt instead of LowVisibility.
std::optional<double> try_hand_head_distance_m(
    const Pose& customer, const Pose& employee, const Calibration& cal,
    double visibility_min = kDefaultVisibilityMin) noexcept;

}  // namespace shopsense
