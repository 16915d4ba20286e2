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


#include <gtest/gtest.h>

#include "shopsense/interactions.hpp"
#include "test_util.hpp"

namespace shopsense {
namespace {

using testing::figure;
using testing::foot;
using testing::Gen;
using testing::still;
using testing::track;

Calibration cal15() { return Calibration{15, 0.01, 640, 480}; }

Encounter encounter(std::int64_t start, std::int64_t end, double fps = 15) {
  Encounter e;
  e.id = 1;
  e.start_frame = start;
  e.end_frame = end;
  e.duration_s = frames_to_seconds(start, end, fps);
  e.customer_track_ids = {2};
  return e;
}

TEST(DetectThreat, CloseHandFires) {
  const Pose employee = figure(100, 100, 0, 0);
  const Pose near = figure(0, 0, 100, 104);  // 4 px = 0.04 m
  const Pose far = figure(0, 0, 100, 160);
  const std::vector<PosePair> frames = {{0, &far, &employee}, {1, &near, &employee}};
  EXPECT_TRUE(detect_threat(frames, cal15(), InteractionParams{}));
}

TEST(DetectThreat, DistantHandsDoNot) {
  const Pose employee = figure(100, 100, 0, 0);
  const Pose far = figure(0, 0, 100, 150);  // 0.5 m
  const std::vector<PosePair> frames(10, PosePair{0, &far, &employee});
  Diagnostics d;
  EXPECT_FALSE(detect_threat(frames, cal15(), InteractionParams{}, &d));
  EXPECT_TRUE(d.empty());
}

TEST(DetectThreat, MissingEmployeePosesAreUnevaluable) {
  const Pose customer = figure(0, 0, 100, 104);
  const std::vector<PosePair> frames(5, PosePair{0, &customer, nullptr});
  Diagnostics d;
  EXPECT_FALSE(detect_threat(frames, cal15(), InteractionParams{}, &d));
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].code, "threat-rule-unevaluable");
}

TEST(DetectThreat, DirectionalUnlessSymmetric) {
  // The employee's hand is at the customer's head, not the other way.
  const Pose customer = figure(100, 100, 400, 400);
  const Pose employee = figure(250, 250, 100, 104);
  const std::vector<PosePair> frames = {{0, &customer, &employee}};
  InteractionParams p;
  EXPECT_FALSE(detect_threat(frames, cal15(), p));
  p.symmetric_threat = true;
  EXPECT_TRUE(detect_threat(frames, cal15(), p));
}

TEST(Stationary, FixedEmployee) {
  const Track e = still(1, Role::Employee, 0, 300, 300, 200);
  EXPECT_TRUE(employee_stationary(e, 0, 300, cal15(), InteractionParams{}));
}

TEST(Stationary, ShuttlingIsNotStill) {
  // 0.5 m/s at 0.01 m/px and 15 fps is 10/3 px per frame, back and forth.
  std::vector<Detection> d;
  double x = 200, v = 10.0 / 3;
  for (std::int64_t f = 0; f <= 600; ++f) {
    d.push_back(foot(f, x, 200));
    x += v;
    if (x > 400 || x < 200) v = -v;
  }
  const Track e = track(1, Role::Employee, d);
  EXPECT_FALSE(employee_stationary(e, 0, 600, cal15(), InteractionParams{}));
}

TEST(Stationary, StillHalfTheTimeCounts) {
  std::vector<Detection> d;
  for (std::int64_t f = 0; f <= 300; ++f) d.push_back(foot(f, f < 160 ? 300 : 300 + 4.0 * (f - 160), 200));
  EXPECT_TRUE(employee_stationary(track(1, Role::Employee, d), 0, 300, cal15(), InteractionParams{}));
  InteractionParams strict;
  strict.stationary_fraction = 0.9;
  EXPECT_FALSE(employee_stationary(track(1, Role::Employee, d), 0, 300, cal15(), strict));
}

TEST(Stationary, OneFrameIsInsufficient) {
  const Track e = still(1, Role::Employee, 10, 10, 300, 200);
  EXPECT_THROW(employee_stationary(e, 0, 100, cal15(), InteractionParams{}), InsufficientData);
}

struct Scene {
  Track employee;
  std::vector<Track> customers;
};

ClassificationContext context(const Scene& s, double d_avg, bool with_employee = true) {
  return {d_avg, with_employee ? &s.employee : nullptr, s.customers, RoiConfig{240, 1}, cal15()};
}

TEST(Classify, LongWithStationaryEmployeeIsPositive) {
  // 300 s against a 100 s mean.
  const Scene s{still(1, Role::Employee, 0, 4499, 300, 200),
                {still(2, Role::Customer, 0, 4499, 300, 300)}};
  const auto c = classify_encounter(encounter(0, 4499), context(s, 100), InteractionParams{});
  EXPECT_EQ(c.cls, InteractionClass::Positive);
  EXPECT_EQ(c.rule, "employee-stationary");
}

TEST(Classify, ShortIsNeutral) {
  const Scene s{still(1, Role::Employee, 0, 899, 300, 200),
                {still(2, Role::Customer, 0, 899, 300, 300)}};
  const auto c = classify_encounter(encounter(0, 899), context(s, 100), InteractionParams{});
  EXPECT_EQ(c.cls, InteractionClass::Neutral);
  EXPECT_EQ(c.rule, "short");
}

TEST(Classify, EmployeeInCustomerArea) {
  std::vector<Detection> d;
  double x = 200, v = 4;
  for (std::int64_t f = 0; f <= 2999; ++f) {
    d.push_back(foot(f, x, f == 1500 ? 260 : 200));
    x += v;
    if (x > 400 || x < 200) v = -v;
  }
  const Scene s{track(1, Role::Employee, d), {still(2, Role::Customer, 0, 2999, 300, 300)}};
  const auto c = classify_encounter(encounter(0, 2999), context(s, 100), InteractionParams{});
  EXPECT_EQ(c.cls, InteractionClass::Positive);
  EXPECT_EQ(c.rule, "employee-in-customer-area");
}

TEST(Classify, LongWithoutEngagementIsNeutralWithDiagnostic) {
  std::vector<Detection> d;
  double x = 200, v = 4;
  for (std::int64_t f = 0; f <= 2999; ++f) {
    d.push_back(foot(f, x, 200));
    x += v;
    if (x > 400 || x < 200) v = -v;
  }
  const Scene s{track(1, Role::Employee, d), {still(2, Role::Customer, 0, 2999, 300, 300)}};
  const auto c = classify_encounter(encounter(0, 2999), context(s, 100), InteractionParams{});
  EXPECT_EQ(c.cls, InteractionClass::Neutral);
  EXPECT_EQ(c.rule, "long-no-engagement");
  ASSERT_FALSE(c.diagnostics.empty());
  EXPECT_EQ(c.diagnostics.back().code, "long-neutral");
}

Scene threat_scene() {
  Scene s{still(1, Role::Employee, 0, 899, 300, 200), {still(2, Role::Customer, 0, 899, 300, 300)}};
  for (auto& d : s.employee.detections) d.pose = figure(300, 110, 280, 150);
  for (auto& d : s.customers[0].detections) d.pose = figure(300, 210, 300, 260);
  s.customers[0].detections[400].pose = figure(300, 210, 300, 112);  // hand 2 px off the nose
  return s;
}

TEST(Classify, ThreatIsNegativeAtAnyDuration) {
  const Scene s = threat_scene();
  for (double d_avg : {1.0, 60.0, 1000.0}) {
    for (double dur : {1.0, 60.0, 100000.0}) {
      Encounter e = encounter(0, 899);
      e.duration_s = dur;
      const auto c = classify_encounter(e, context(s, d_avg), InteractionParams{});
      EXPECT_EQ(c.cls, InteractionClass::Negative);
      EXPECT_EQ(c.rule, "threat");
    }
  }
  const auto c = classify_encounter(encounter(0, 899), context(s, 60), InteractionParams{});
  EXPECT_NEAR(c.pose_duration_s, 900.0 / 15, 1e-12);
}

TEST(Classify, FallbackWithoutEmployeeIsTotal) {
  Gen g(12);
  const Scene s{Track{}, {still(2, Role::Customer, 0, 10, 300, 300)}};
  for (int i = 0; i < 200; ++i) {
    Encounter e = encounter(0, 10);
    e.duration_s = g.uniform(0.1, 1000);
    const double avg = g.uniform(0.1, 1000);
    const auto c = classify_encounter(e, context(s, avg, false), InteractionParams{});
    ASSERT_NE(c.cls, InteractionClass::Unclassified);
    EXPECT_EQ(c.cls == InteractionClass::Positive, e.duration_s > avg * (1 + 1e-9));
  }
}

TEST(Classify, InsufficientEmployeeDataFallsBackToDuration) {
  const Scene s{still(1, Role::Employee, 10, 10, 300, 200),
                {still(2, Role::Customer, 0, 2999, 300, 300)}};
  const auto c = classify_encounter(encounter(0, 2999), context(s, 100), InteractionParams{});
  EXPECT_EQ(c.cls, InteractionClass::Positive);
  EXPECT_EQ(c.rule, "duration-only");
  ASSERT_FALSE(c.diagnostics.empty());
}

TEST(Classify, PropertyDurationScalingPreservesSplit) {
  Gen g(21);
  const Scene s{Track{}, {still(2, Role::Customer, 0, 10, 300, 300)}};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> dur(static_cast<std::size_t>(g.integer(1, 8)));
    for (double& d : dur) d = g.uniform(1, 500);
    double avg = 0;
    for (double d : dur) avg += d;
    avg /= static_cast<double>(dur.size());
    const double k = g.uniform(0.01, 100);
    for (double d : dur) {
      Encounter a = encounter(0, 10), b = encounter(0, 10);
      a.duration_s = d;
      b.duration_s = d * k;
      const auto ca = classify_encounter(a, context(s, avg, false), InteractionParams{});
      const auto cb = classify_encounter(b, context(s, avg * k, false), InteractionParams{});
      if (std::abs(d - avg) > 1e-6 * avg) EXPECT_EQ(ca.cls, cb.cls);
    }
  }
}

TEST(InteractionParams, Validation) {
  InteractionParams p;
  p.threat_dist_m = 0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.stationary_fraction = 1.5;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.neutral_slack = 0.9;
  EXPECT_THROW(p.validate(), ConfigError);
}

}  // namespace
}  // namespace shopsense
