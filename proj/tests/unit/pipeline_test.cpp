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

#include <sstream>

#include "shopsense/pipeline.hpp"
#include "shopsense/simgen.hpp"

namespace shopsense {
namespace {

PipelineResult run(const std::string& name, RunConfig c = {}, bool noise = false) {
  const ScenarioSpec s = builtin_scenario(name);
  const Scenario sc = noise ? generate(s) : generate(s, NoiseSpec{});
  return run_pipeline(sc.stream, c);
}

class NoiseFree : public ::testing::TestWithParam<std::string> {};

TEST_P(NoiseFree, RecoversGroundTruth) {
  const ScenarioSpec s = builtin_scenario(GetParam());
  const Scenario sc = generate(s, NoiseSpec{});
  const PipelineResult r = run_pipeline(sc.stream, RunConfig{});
  EXPECT_FALSE(r.degraded);
  EXPECT_EQ(r.job_demands.C, sc.truth.customer_count);
  ASSERT_EQ(r.job_demands.S.size(), sc.truth.encounters.size());
  for (std::size_t i = 0; i < r.job_demands.S.size(); ++i) {
    const Encounter& e = r.job_demands.S[i];
    const GroundTruthEncounter& g = sc.truth.encounters[i];
    EXPECT_EQ(e.start_frame, g.start_frame);
    EXPECT_EQ(e.end_frame, g.end_frame);
    EXPECT_EQ(e.cls, g.cls) << "encounter " << i;
  }
}

INSTANTIATE_TEST_SUITE_P(Builtins, NoiseFree,
                         ::testing::Values("single-customer", "three-customers", "five-customers",
                                           "threat", "long-positive"),
                         [](const auto& info) {
                           std::string n = info.param;
                           for (char& ch : n) {
                             if (ch == '-') ch = '_';
                           }
                           return n;
                         });

TEST(Pipeline, ReidRepairsReEntry) {
  const PipelineResult r = run("re-entry");
  EXPECT_GT(r.raw_tracks, r.reid_tracks);
  EXPECT_EQ(r.job_demands.C, 1);
  RunConfig off;
  off.reid_enabled = false;
  EXPECT_EQ(run("re-entry", off).job_demands.C, 2);
}

TEST(Pipeline, ReportIsDeterministic) {
  const std::string a = report_json(run("three-customers", {}, true));
  EXPECT_EQ(a, report_json(run("three-customers", {}, true)));
  const ReportDigest d = parse_report(a);
  EXPECT_EQ(d.source_id, "three-customers");
  EXPECT_DOUBLE_EQ(d.fps, 15);
  EXPECT_EQ(d.job_demands.S.size(), 3u);
  EXPECT_EQ(d.job_demands.C, 3);
}

TEST(Pipeline, ParseReportRejectsGarbage) {
  EXPECT_THROW(parse_report("{}"), SchemaError);
  EXPECT_THROW(parse_report("]"), SchemaError);
}

TEST(Pipeline, FragmentedEmployeeDegradesProximityMode) {
  RunConfig c;
  c.mode = SegmentationMode::Proximity;
  const PipelineResult r = run("fragmented-employee", c, true);
  EXPECT_TRUE(r.degraded);
  bool coverage = false;
  for (const auto& d : r.diagnostics) coverage |= d.code == "employee-coverage";
  EXPECT_TRUE(coverage);
  EXPECT_NO_THROW(verify(r.job_demands, r.calibration));
}

TEST(Pipeline, NoEmployeeIsDegradedNotFatal) {
  ScenarioSpec s = builtin_scenario("single-customer");
  s.agents.erase(s.agents.begin());
  const Scenario sc = generate(s, NoiseSpec{});
  const PipelineResult r = run_pipeline(sc.stream, RunConfig{});
  EXPECT_TRUE(r.degraded);
  ASSERT_EQ(r.job_demands.S.size(), 1u);
  EXPECT_NE(r.job_demands.S[0].cls, InteractionClass::Unclassified);
  RunConfig c;
  c.mode = SegmentationMode::Proximity;
  EXPECT_TRUE(run_pipeline(sc.stream, c).degraded);
}

TEST(Pipeline, OverridesApply) {
  RunConfig c;
  c.fps = 30;
  const PipelineResult r = run("single-customer", c);
  EXPECT_DOUBLE_EQ(r.calibration.fps, 30);
  const Encounter& e = r.job_demands.S[0];
  EXPECT_DOUBLE_EQ(e.duration_s, (e.end_frame - e.start_frame + 1) / 30.0);
  EXPECT_NE(report_summary(r).find("customers (C): 1"), std::string::npos);
}

}  // namespace
}  // namespace shopsense
