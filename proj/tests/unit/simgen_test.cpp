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

#include <algorithm>
#include <sstream>

#include "shopsense/encounters.hpp"
#include "shopsense/ingest.hpp"
#include "shopsense/simgen.hpp"
#include "test_util.hpp"

namespace shopsense {
namespace {

ScenarioSpec three_customers_plain() {
  ScenarioSpec s;
  s.name = "plain";
  s.duration_frames = 120;
  s.emit_embeddings = s.emit_patches = s.emit_poses = false;
  AgentSpec e;
  e.role = Role::Employee;
  e.start = {320, 200};
  e.legs = {Leg::wait(119)};
  s.agents.push_back(e);
  for (int i = 0; i < 3; ++i) {
    AgentSpec c;
    c.entry_frame = 10 + 30 * i;
    c.start = {100.0 + 150 * i, 400};
    c.legs = {Leg::move(100.0 + 150 * i, 350, 2), Leg::wait(5)};
    s.agents.push_back(c);
  }
  return s;
}

TEST(AgentPath, MoveWaitHide) {
  AgentSpec a;
  a.entry_frame = 5;
  a.start = {0, 300};
  a.legs = {Leg::move(10, 300, 4), Leg::hide(3), Leg::wait(2)};
  const AgentPath p = agent_path(a, 100);
  const std::vector<std::int64_t> frames = {5, 6, 7, 8, 12, 13};
  EXPECT_EQ(p.frames, frames);
  EXPECT_EQ(p.feet[1], Eigen::Vector2d(4, 300));
  EXPECT_EQ(p.feet[3], Eigen::Vector2d(10, 300));
  EXPECT_EQ(p.feet[5], Eigen::Vector2d(10, 300));
  EXPECT_EQ(agent_path(a, 8).frames.size(), 3u);  // clipped at the scenario end
}

TEST(Generate, NoiseFreeEmitsExactlyTheScriptedBoxes) {
  const ScenarioSpec s = three_customers_plain();
  const Scenario sc = generate(s);
  EXPECT_EQ(sc.truth.customer_count, 3);
  ASSERT_EQ(sc.stream.frames.size(), 120u);
  std::size_t expected = 0;
  for (const AgentSpec& a : s.agents) {
    const AgentPath p = agent_path(a, s.duration_frames);
    expected += p.frames.size();
    for (std::size_t k = 0; k < p.frames.size(); ++k) {
      const auto& dets = sc.stream.frames[p.frames[k]].detections;
      const BBox want(p.feet[k].x(), p.feet[k].y() - a.height / 2, a.width, a.height);
      EXPECT_TRUE(std::any_of(dets.begin(), dets.end(),
                              [&](const Detection& d) { return d.bbox == want; }))
          << "frame " << p.frames[k];
    }
  }
  std::size_t total = 0;
  for (const auto& f : sc.stream.frames) total += f.detections.size();
  EXPECT_EQ(total, expected);
  ASSERT_EQ(sc.truth.encounters.size(), 3u);
  EXPECT_EQ(sc.truth.encounters[0].start_frame, 10);
  EXPECT_EQ(sc.truth.encounters[0].end_frame, 10 + 25 + 5);
}

TEST(Generate, SameSeedSameBytes) {
  ScenarioSpec s = builtin_scenario("three-customers");
  NoiseSpec n;
  n.miss_prob = 0.1;
  n.jitter_px = 2;
  n.seed = 42;
  const std::string a = emit_stream(generate(s, n).stream);
  EXPECT_EQ(a, emit_stream(generate(s, n).stream));
  n.seed = 43;
  EXPECT_NE(a, emit_stream(generate(s, n).stream));
}

TEST(Generate, StreamRoundTripsByteIdentically) {
  const Scenario sc = generate(builtin_scenario("single-customer"));
  const std::string text = emit_stream(sc.stream);
  std::istringstream in(text);
  const DetectionStream back = parse_stream(in);
  EXPECT_EQ(emit_stream(back), text);
  EXPECT_EQ(back.header.embedding_dim, 128);
}

TEST(Generate, CrossingDropsTheRearBox) {
  const ScenarioSpec s = builtin_scenario("crossing");
  ASSERT_LT(s.noise.occlusion_iou, 1.0);
  const Scenario sc = generate(s);
  std::vector<AgentPath> paths;
  for (const auto& a : s.agents) paths.push_back(agent_path(a, s.duration_frames));
  int dropped = 0;
  for (std::int64_t f = 0; f < s.duration_frames; ++f) {
    std::vector<BBox> boxes;
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
      const auto& p = paths[i];
      const auto it = std::find(p.frames.begin(), p.frames.end(), f);
      if (it == p.frames.end()) continue;
      const auto& ft = p.feet[static_cast<std::size_t>(it - p.frames.begin())];
      boxes.emplace_back(ft.x(), ft.y() - s.agents[i].height / 2, s.agents[i].width,
                         s.agents[i].height);
    }
    // Oracle: a box is dropped iff some other box overlaps it above the
    // threshold and stands lower in the image.
    std::size_t want = 0;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      bool hidden = false;
      for (std::size_t j = 0; j < boxes.size(); ++j) {
        if (i != j && iou(boxes[i], boxes[j]) > s.noise.occlusion_iou &&
            boxes[i].y2() < boxes[j].y2()) {
          hidden = true;
        }
      }
      want += !hidden;
    }
    EXPECT_EQ(sc.stream.frames[f].detections.size(), want) << "frame " << f;
    dropped += static_cast<int>(boxes.size() - want);
  }
  EXPECT_GT(dropped, 0);
}

TEST(Builtins, ThreatHandsAtThreeCentimetres) {
  const ScenarioSpec s = builtin_scenario("threat");
  const Scenario sc = generate(s, NoiseSpec{});
  ASSERT_FALSE(sc.truth.encounters.empty());
  EXPECT_EQ(sc.truth.encounters[0].cls, InteractionClass::Negative);
  const PoseEvent& ev = s.agents[1].pose_events.at(0);
  const std::int64_t f = (ev.start + ev.end) / 2;
  const Pose* customer = nullptr;
  const Pose* employee = nullptr;
  for (const Detection& d : sc.stream.frames[f].detections) {
    if (!d.pose) continue;
    if (d.bbox.y2() < s.layout.roi_y) {
      employee = &*d.pose;
    } else {
      customer = &*d.pose;
    }
  }
  ASSERT_NE(customer, nullptr);
  ASSERT_NE(employee, nullptr);
  EXPECT_NEAR(hand_head_distance_m(*customer, *employee, s.layout.cal), 0.03, 1e-9);
}

TEST(Builtins, RushHasFourteenCustomers) {
  EXPECT_EQ(generate(builtin_scenario("rush")).truth.customer_count, 14);
}

TEST(Builtins, LongPositiveContainsThreeFortySix) {
  const Scenario sc = generate(builtin_scenario("long-positive"));
  int long_ones = 0;
  for (const auto& e : sc.truth.encounters) {
    const double s = frames_to_seconds(e.start_frame, e.end_frame, 15);
    if (s > 200) {
      ++long_ones;
      EXPECT_NEAR(s, 226, 0.5);
      EXPECT_EQ(e.cls, InteractionClass::Positive);
    } else {
      EXPECT_LT(s, 30);
    }
  }
  EXPECT_EQ(long_ones, 1);
}

TEST(Builtins, AllGenerate) {
  const auto names = builtin_names();
  EXPECT_GE(names.size(), 10u);
  for (const auto& n : names) {
    const ScenarioSpec s = builtin_scenario(n);
    EXPECT_EQ(s.name, n);
    EXPECT_NO_THROW(s.validate()) << n;
  }
  EXPECT_THROW(builtin_scenario("nope"), SpecError);
}

TEST(ScenarioSpec, ValidationErrors) {
  ScenarioSpec s = three_customers_plain();
  s.duration_frames = 0;
  EXPECT_THROW(s.validate(), SpecError);
  s = three_customers_plain();
  s.agents[0].start = {320, 300};  // employee outside the staff area
  EXPECT_THROW(s.validate(), SpecError);
  s = three_customers_plain();
  s.agents[1].legs.push_back(Leg::move(900, 10));
  EXPECT_THROW(s.validate(), SpecError);
  s = three_customers_plain();
  s.agents[1].pose_events.push_back({0, 10, 7, 0.03});
  EXPECT_THROW(s.validate(), SpecError);
  s = three_customers_plain();
  s.noise.miss_prob = 2;
  EXPECT_THROW(s.validate(), SpecError);
}

TEST(ScenarioSpec, JsonRoundTrip) {
  for (const auto& n : builtin_names()) {
    const ScenarioSpec s = builtin_scenario(n);
    EXPECT_EQ(scenario_from_json(scenario_to_json(s)), s) << n;
  }
  EXPECT_THROW(scenario_from_json("[1]"), SpecError);
  EXPECT_THROW(scenario_from_json("{"), SpecError);
}

}  // namespace
}  // namespace shopsense
