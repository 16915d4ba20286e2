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

// Online multi-person tracking: constant-velocity prediction per track,
// Hungarian association on an IoU cost, SORT-style track life cycle.

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "shopsense/ingest.hpp"
#include "shopsense/kalman.hpp"
#include "shopsense/model.hpp"

namespace shopsense {

struct TrackerParams {
  double iou_min = 0.3;
  int max_age = 30;    // frames a track survives unmatched
  int min_hits = 3;    // detections before a track is reported
  double appearance_weight = 0.0;
  double confidence_min = 0.25;
  bool mahalanobis_gating = false;
  double gating_threshold = 9.4877;  // chi-square 0.95 quantile, 4 dof
  KalmanNoise<double> noise;

  void validate() const;  // throws ConfigError
  bool operator==(const TrackerParams&) const = default;
};

struct AssociationResult {
  std::vector<std::pair<int, int>> matches;  // (track_idx, det_idx)
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;
  double total_cost = 0;  // optimal assignment cost before IoU gating
};

// Cost (1 - IoU), blended with appearance dissimilarity when
// appearance_weight > 0 and both sides carry an embedding:
//   ((1 - iou) + w * (1 - (1 + cos) / 2)) / (1 + w)
Eigen::MatrixXd association_cost(
    std::span<const BBox> predicted, std::span<const Detection> observed,
    const TrackerParams& params,
    std::span<const std::optional<Eigen::VectorXd>> track_embeddings = {});

// Minimum-cost one-to-one matching; any pair with IoU < iou_min is reported
// unmatched even if the assignment chose it. `gate` (same shape as the cost
// matrix, optional) marks pairs that must not match.
AssociationResult associate(
    std::span<const BBox> predicted, std::span<const Detection> observed,
    const TrackerParams& params,
    std::span<const std::optional<Eigen::VectorXd>> track_embeddings = {},
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>* gate = nullptr);

// Per-match diagnostics, exported as CSV with --debug-dumps.
struct TrackerDebugRow {
  std::int64_t frame = 0;
  int track_id = 0;
  int det_index = 0;
  double cost = 0;
  double nis = 0;  // normalized innovation squared
};

struct TrackerDebug {
  std::vector<TrackerDebugRow> rows;
  void write_csv(std::ostream& out) const;
};

// Single-video tracking state machine.
class MultiTracker {
 public:
  explicit MultiTracker(TrackerParams params);

  // Records must arrive with nondecreasing frame_index.
  void step(const FrameRecord& record);
  // Confirmed tracks (>= min_hits detections), ascending track_id.
  std::vector<Track> finish();

  void set_debug(TrackerDebug* debug) { debug_ = debug; }
  std::size_t live_tracks() const { return live_.size(); }

 private:
  struct Live {
    Track track;
    KalmanState<double> filter;
    int since_update = 0;
  };

  void advance_to(std::int64_t frame);
  void retire(std::size_t idx);

  TrackerParams params_;
  std::vector<Live> live_;
  std::vector<Track> done_;
  std::int64_t frame_ = -1;
  int next_id_ = 1;
  TrackerDebug* debug_ = nullptr;
};

std::vector<Track> run_tracking(std::span<const FrameRecord> frames,
                                const TrackerParams& params, TrackerDebug* debug = nullptr);

}  // namespace shopsense
