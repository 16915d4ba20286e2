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

#include <cmath>
#include <sstream>

#include "shopsense/evaluate.hpp"
#include "test_util.hpp"

namespace shopsense {
namespace {

using testing::Gen;

long pct(double x) { return std::lround(100 * x); }

Encounter enc(std::int64_t s, std::int64_t e, int n = 1,
              InteractionClass cls = InteractionClass::Neutral) {
  Encounter x;
  x.start_frame = s;
  x.end_frame = e;
  x.n_customers = n;
  for (int i = 0; i < n; ++i) x.customer_track_ids.insert(i + 1);
  x.duration_s = frames_to_seconds(s, e, 15);
  x.cls = cls;
  return x;
}

TEST(TemporalIou, InclusiveFrames) {
  EXPECT_DOUBLE_EQ(temporal_iou(0, 9, 0, 9), 1.0);
  EXPECT_DOUBLE_EQ(temporal_iou(0, 9, 10, 19), 0.0);
  EXPECT_DOUBLE_EQ(temporal_iou(0, 9, 5, 14), 5.0 / 15);
  EXPECT_DOUBLE_EQ(temporal_iou(0, 99, 10, 89), 0.8);
}

TEST(Match, IdenticalDisjointAndPartial) {
  const std::vector<Encounter> pred = {enc(0, 99), enc(200, 299)};
  const std::vector<GroundTruthEncounter> same = {{0, 99}, {200, 299}};
  const auto m = match_encounters(pred, same);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].pred, 0);
  EXPECT_EQ(m[1].pred, 1);
  const std::vector<GroundTruthEncounter> apart = {{400, 499}};
  EXPECT_TRUE(match_encounters(pred, apart).empty());
  // Prediction covering 80% of the truth interval.
  const std::vector<Encounter> inner = {enc(10, 89)};
  const std::vector<GroundTruthEncounter> gt = {{0, 99}};
  const auto p = match_encounters(inner, gt);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_DOUBLE_EQ(p[0].tiou, 0.8);
}

TEST(Match, GreedyOneToOne) {
  const std::vector<Encounter> pred = {enc(0, 99), enc(0, 79)};
  const std::vector<GroundTruthEncounter> gt = {{0, 99}};
  const auto m = match_encounters(pred, gt);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].pred, 0);
  const std::vector<Encounter> weak = {enc(0, 24)};
  EXPECT_TRUE(match_encounters(weak, gt).empty());  // IoU 0.25
}

TEST(CountMetrics, Rows) {
  auto m = count_metrics(6, 7, 6);
  EXPECT_NEAR(m.accuracy, 6.0 / 7, 1e-12);
  EXPECT_EQ(pct(m.accuracy), 86);
  EXPECT_DOUBLE_EQ(m.recall, 1.0);
  m = count_metrics(4, 13, 4);
  EXPECT_EQ(pct(m.accuracy), 31);
  EXPECT_DOUBLE_EQ(m.recall, 1.0);
  m = count_metrics(5, 5, 5);
  EXPECT_DOUBLE_EQ(m.accuracy, 1.0);
  m = count_metrics(0, 0, 0);
  EXPECT_DOUBLE_EQ(m.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(m.recall, 1.0);
  EXPECT_THROW(count_metrics(3, 2, 3), InvalidValue);
}

TEST(CountMetrics, PropertySymmetricAccuracyBoundedRecall) {
  Gen g(4);
  for (int i = 0; i < 1000; ++i) {
    const int a = g.integer(0, 40), b = g.integer(0, 40);
    const int m = g.integer(0, std::min(a, b));
    const auto x = count_metrics(a, b, m);
    EXPECT_DOUBLE_EQ(x.accuracy, count_metrics(b, a, m).accuracy);
    EXPECT_GE(x.accuracy, 0);
    EXPECT_LE(x.accuracy, 1);
    EXPECT_GE(x.recall, 0);
    EXPECT_LE(x.recall, 1);
  }
}

// Every published accuracy/recall pair must be produced by exactly one
// predicted count in 1..30, and rounding must give the published cells.
TEST(CountMetrics, TableConsistencyOracle) {
  struct Row {
    int c_true;
    long accuracy, recall;
    int expect_pred, expect_matched;
  };
  const Row rows[] = {{6, 86, 100, 7, 6}, {14, 43, 43, 6, 6}, {1, 100, 100, 1, 1},
                      {4, 80, 100, 5, 4}, {4, 31, 100, 13, 4}};
  for (const Row& r : rows) {
    std::vector<std::pair<int, int>> hits;
    for (int c_pred = 1; c_pred <= 30; ++c_pred) {
      for (int matched = 0; matched <= std::min(r.c_true, c_pred); ++matched) {
        const auto m = count_metrics(r.c_true, c_pred, matched);
        if (pct(m.accuracy) == r.accuracy && pct(m.recall) == r.recall) {
          hits.emplace_back(c_pred, matched);
        }
      }
    }
    ASSERT_EQ(hits.size(), 1u) << "c_true " << r.c_true;
    EXPECT_EQ(hits[0], std::make_pair(r.expect_pred, r.expect_matched));
  }
  // Averages across the five rows.
  const double acc = (6.0 / 7 + 6.0 / 14 + 1 + 4.0 / 5 + 4.0 / 13) / 5;
  const double rec = (1 + 6.0 / 14 + 1 + 1 + 1) / 5;
  EXPECT_EQ(pct(acc), 68);
  EXPECT_EQ(pct(rec), 89);
}

TEST(DurationError, Examples) {
  EXPECT_DOUBLE_EQ(duration_error(69, 69), 0.0);
  EXPECT_NEAR(duration_error(100, 71), 0.29, 1e-12);
  EXPECT_THROW(duration_error(0, 5), ZeroTruth);
  // A 7% error around 69 s puts the prediction at 69 * (1 -+ 0.07).
  EXPECT_NEAR(duration_error(69, 69 * 0.93), 0.07, 1e-12);
  EXPECT_NEAR(duration_error(69, 69 * 1.07), 0.07, 1e-12);
  EXPECT_NEAR(69 * 0.93, 64.2, 0.05);
  EXPECT_NEAR(69 * 1.07, 73.8, 0.05);
  for (double d = 60; d <= 80; d += 0.01) {
    if (pct(duration_error(69, d)) == 7) EXPECT_NEAR(std::abs(d - 69), 69 * 0.07, 69 * 0.005 + 1e-9);
  }
  EXPECT_EQ(pct(duration_error(69, 64.2)), 7);
  EXPECT_EQ(pct(duration_error(69, 73.8)), 7);
}

TEST(Evaluate, CountsDurationsAndConfusion) {
  JobDemands pred;
  pred.S = {enc(0, 899, 1, InteractionClass::Positive), enc(1000, 1299, 2),
            enc(5000, 5099, 1, InteractionClass::Negative)};
  pred.C = 4;
  pred.D_total_min = (60 + 20 + 100.0 / 15) / 60;
  pred.D_avg_min = pred.D_total_min / 3;
  GroundTruth gt;
  gt.video_id = "v1";
  gt.customer_count = 3;
  gt.encounters = {{0, 899, InteractionClass::Positive, 1}, {1000, 1299, InteractionClass::Neutral, 2}};
  const EvalReport r = evaluate(pred, gt, 15);
  EXPECT_EQ(r.c_true, 3);
  EXPECT_EQ(r.c_pred, 4);
  EXPECT_EQ(r.matched, 3);
  EXPECT_DOUBLE_EQ(r.count_accuracy, 0.75);
  EXPECT_DOUBLE_EQ(r.recall, 1.0);
  EXPECT_DOUBLE_EQ(r.d_avg_true_s, 40);
  EXPECT_NEAR(r.d_avg_pred_s, (80 + 100.0 / 15) / 3, 1e-9);
  EXPECT_EQ(r.class_confusion[0][0], 1);
  EXPECT_EQ(r.class_confusion[1][1], 1);
  int total = 0;
  for (const auto& row : r.class_confusion) {
    for (int x : row) total += x;
  }
  EXPECT_EQ(total, 2);
  EXPECT_DOUBLE_EQ(r.positive_ratio_true, 0.5);
  EXPECT_NEAR(r.positive_ratio_pred, 1.0 / 3, 1e-12);
}

TEST(Evaluate, EmptyTruth) {
  const EvalReport r = evaluate(JobDemands{}, GroundTruth{}, 15);
  EXPECT_DOUBLE_EQ(r.count_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(r.recall, 1.0);
  EXPECT_DOUBLE_EQ(r.duration_error, 0.0);
}

TEST(EvalReport, JsonRoundTrip) {
  EvalReport r;
  r.video_id = "x";
  r.c_true = 6;
  r.c_pred = 7;
  r.matched = 6;
  r.count_accuracy = 0.857143;
  r.recall = 1;
  r.d_avg_true_s = 83;
  r.d_avg_pred_s = 107.9;
  r.duration_error = 0.3;
  r.class_confusion[0][1] = 2;
  r.positive_ratio_true = 0.125;
  EXPECT_EQ(eval_from_json(to_json(r)), r);
  EXPECT_THROW(eval_from_json("{}"), SchemaError);
  EXPECT_THROW(eval_from_json("nope"), SchemaError);
}

TEST(TableCsv, RowFormatting) {
  EvalReport r;
  r.video_id = "1";
  r.c_true = 6;
  r.c_pred = 7;
  r.matched = 6;
  r.count_accuracy = 6.0 / 7;
  r.recall = 1;
  r.d_avg_true_s = 83;
  r.d_avg_pred_s = 107.9;
  r.duration_error = 0.3;
  r.positive_ratio_true = 0.12;
  r.positive_ratio_pred = 0.125;
  std::ostringstream out;
  write_table_csv(std::span<const EvalReport>(&r, 1), out);
  EXPECT_EQ(out.str(),
            "video,customers_true,customers_pred,accuracy,recall,duration_true,duration_pred,"
            "duration_error,positive_ratio_true,positive_ratio_pred\n"
            "1,6,7,86%,100%,1:23,1:48,30%,12%,13%\n");
  const std::vector<EvalReport> two = {r, r};
  std::ostringstream avg;
  write_table_csv(two, avg);
  EXPECT_NE(avg.str().find("\naverage,,,86%,100%,1:23,"), std::string::npos);
}

TEST(FormatMss, Rounds) {
  EXPECT_EQ(format_mss(69.4), "1:09");
  EXPECT_EQ(format_mss(111), "1:51");
  EXPECT_EQ(format_mss(0), "0:00");
  EXPECT_EQ(format_mss(226), "3:46");
}

}  // namespace
}  // namespace shopsense
