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

// Comparison of predicted encounters against manually coded ground truth:
// customer-count accuracy and recall, mean-duration error, and the share of
// positive encounters.

#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shopsense/encounters.hpp"
#include "shopsense/ingest.hpp"

namespace shopsense {

// Inclusive frame intervals.
double temporal_iou(std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) noexcept;

struct EncounterMatch {
  int pred = 0;  // index into the predicted list
  int gt = 0;    // index into the ground-truth list
  double tiou = 0;
};

// Greedy one-to-one matching, highest temporal IoU first; ties resolve to
// the lower (pred, gt) index pair. Pairs below tiou_min stay unmatched.
std::vector<EncounterMatch> match_encounters(std::span<const Encounter> pred,
                                             std::span<const GroundTruthEncounter> gt,
                                             double tiou_min = 0.3);

struct CountMetrics {
  double accuracy = 0;  // min/max of the two counts, 1 when both are 0
  double recall = 0;    // matched / c_true, 1 when c_true is 0
};

CountMetrics count_metrics(int c_true, int c_pred, int matched);

// |d_pred - d_true| / d_true. Throws ZeroTruth unless d_true > 0.
double duration_error(double d_true, double d_pred);

struct EvalReport {
  std::string video_id;
  int c_true = 0;
  int c_pred = 0;
  int matched = 0;
  double count_accuracy = 0;
  double recall = 0;
  double d_avg_true_s = 0;
  double d_avg_pred_s = 0;
  double duration_error = 0;  // 0 when there is no truth duration
  // Rows: ground truth, columns: prediction; order positive, neutral, negative.
  std::array<std::array<int, 3>, 3> class_confusion{};
  double positive_ratio_true = 0;
  double positive_ratio_pred = 0;

  bool operator==(const EvalReport&) const = default;
};

EvalReport evaluate(const JobDemands& pred, const GroundTruth& gt, double fps,
                    double tiou_min = 0.3);

std::string to_json(const EvalReport& r);
EvalReport eval_from_json(std::string_view text);  // throws SchemaError

// One row per report plus an averages row, percentages rounded to whole
// numbers and durations as m:ss.
void write_table_csv(std::span<const EvalReport> reports, std::ostream& out);

// 69.4 -> "1:09".
std::string format_mss(double seconds);

}  // namespace shopsense
