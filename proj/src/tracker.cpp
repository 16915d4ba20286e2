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

#include "shopsense/tracker.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "shopsense/hungarian.hpp"

namespace shopsense {

void TrackerParams::validate() const {
  if (!(iou_min >= 0 && iou_min <= 1)) throw ConfigError("tracker.iou_min must be in [0,1]");
  if (max_age < 0) throw ConfigError("tracker.max_age must be >= 0");
  if (min_hits < 1) throw ConfigError("tracker.min_hits must be >= 1");
  if (!(appearance_weight >= 0 && appearance_weight <= 1)) {
    throw ConfigError("tracker.appearance_weight must be in [0,1]");
  }
  if (!(confidence_min >= 0 && confidence_min <= 1)) {
    throw ConfigError("tracker.confidence_min must be in [0,1]");
  }
  if (!(gating_threshold > 0)) throw ConfigError("tracker.gating_threshold must be > 0");
  for (double s : {noise.position, noise.velocity, noise.area, noise.area_velocity, noise.aspect,
                   noise.measurement, noise.measurement_area, noise.measurement_aspect,
                   noise.initial_velocity, noise.initial_area_velocity}) {
    if (!(s > 0)) throw ConfigError("tracker noise terms must be > 0");
  }
}

Eigen::MatrixXd association_cost(std::span<const BBox> predicted,
                                 std::span<const Detection> observed,
                                 const TrackerParams& params,
                                 std::span<const std::optional<Eigen::VectorXd>> track_embeddings) {
  const auto nt = static_cast<Eigen::Index>(predicted.size());
  const auto nd = static_cast<Eigen::Index>(observed.size());
  Eigen::MatrixXd cost(nt, nd);
  const double w = params.appearance_weight;
  for (Eigen::Index t = 0; t < nt; ++t) {
    const std::optional<Eigen::VectorXd>* emb =
        static_cast<std::size_t>(t) < track_embeddings.size() ? &track_embeddings[t] : nullptr;
    for (Eigen::Index d = 0; d < nd; ++d) {
      double c = 1.0 - iou(predicted[t], observed[d].bbox);
      if (w > 0 && emb && emb->has_value() && observed[d].embedding &&
          (*emb)->size() == observed[d].embedding->size()) {
        const double sim = (1.0 + (*emb)->dot(*observed[d].embedding)) / 2.0;
        c = (c + w * (1.0 - sim)) / (1.0 + w);
      }
      cost(t, d) = c;
    }
  }
  return cost;
}

AssociationResult associate(std::span<const BBox> predicted, std::span<const Detection> observed,
                            const TrackerParams& params,
                            std::span<const std::optional<Eigen::VectorXd>> track_embeddings,
                            const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>* gate) {
  AssociationResult out;
  const Eigen::MatrixXd cost = association_cost(predicted, observed, params, track_embeddings);
  std::vector<bool> track_used(predicted.size(), false), det_used(observed.size(), false);
  if (cost.size() > 0) {
    const auto solved = solve_assignment(cost);
    out.total_cost = solved.cost;
    for (auto [t, d] : solved.pairs) {
      if (iou(predicted[t], observed[d].bbox) < params.iou_min) continue;
      if (gate && (*gate)(t, d)) continue;
      out.matches.emplace_back(t, d);
      track_used[t] = true;
      det_used[d] = true;
    }
  }
  for (std::size_t t = 0; t < predicted.size(); ++t) {
    if (!track_used[t]) out.unmatched_tracks.push_back(static_cast<int>(t));
  }
  for (std::size_t d = 0; d < observed.size(); ++d) {
    if (!det_used[d]) out.unmatched_detections.push_back(static_cast<int>(d));
  }
  return out;
}

void TrackerDebug::write_csv(std::ostream& out) const {
  out << "frame,track_id,det_index,cost,nis\n";
  for (const auto& r : rows) {
    out << r.frame << ',' << r.track_id << ',' << r.det_index << ',' << r.cost << ',' << r.nis
        << '\n';
  }
}

MultiTracker::MultiTracker(TrackerParams params) : params_(std::move(params)) {
  params_.validate();
}

void MultiTracker::advance_to(std::int64_t frame) {
  const std::int64_t gap = frame_ < 0 ? 1 : frame - frame_;
  for (Live& l : live_) {
    for (std::int64_t k = 0; k < gap; ++k) l.filter = predict(l.filter, params_.noise);
    l.since_update += static_cast<int>(gap);
  }
  frame_ = frame;
  // since_update counts the current frame, which may still bring a match.
  for (std::size_t i = live_.size(); i-- > 0;) {
    if (live_[i].since_update - 1 > params_.max_age) retire(i);
  }
}

void MultiTracker::retire(std::size_t idx) {
  if (static_cast<int>(live_[idx].track.detections.size()) >= params_.min_hits) {
    done_.push_back(std::move(live_[idx].track));
  }
  live_.erase(live_.begin() + static_cast<std::ptrdiff_t>(idx));
}

void MultiTracker::step(const FrameRecord& record) {
  if (record.frame_index <= frame_) {
    throw InvalidValue("tracker frames must be strictly increasing, got " +
                       std::to_string(record.frame_index) + " after " + std::to_string(frame_));
  }
  advance_to(record.frame_index);

  std::vector<Detection> dets;
  dets.reserve(record.detections.size());
  for (const Detection& d : record.detections) {
    if (d.confidence >= params_.confidence_min) dets.push_back(d);
  }

  std::vector<BBox> predicted;
  std::vector<std::optional<Eigen::VectorXd>> embeddings;
  predicted.reserve(live_.size());
  for (const Live& l : live_) {
    predicted.push_back(kalman::to_bbox(l.filter));
    if (params_.appearance_weight > 0) embeddings.push_back(l.track.detections.back().embedding);
  }

  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> gate;
  if (params_.mahalanobis_gating) {
    gate.resize(static_cast<Eigen::Index>(live_.size()), static_cast<Eigen::Index>(dets.size()));
    for (std::size_t t = 0; t < live_.size(); ++t) {
      for (std::size_t d = 0; d < dets.size(); ++d) {
        gate(t, d) = innovate(live_[t].filter, dets[d].bbox, params_.noise).nis() >
                     params_.gating_threshold;
      }
    }
  }

  const AssociationResult assoc =
      associate(predicted, dets, params_, embeddings, params_.mahalanobis_gating ? &gate : nullptr);
  for (auto [t, d] : assoc.matches) {
    Live& l = live_[t];
    const auto upd = update(l.filter, dets[d].bbox, params_.noise);
    if (debug_) {
      debug_->rows.push_back({record.frame_index, l.track.track_id, d,
                              1.0 - iou(predicted[t], dets[d].bbox), upd.nis()});
    }
    l.filter = upd.state;
    l.since_update = 0;
    l.track.detections.push_back(dets[d]);
  }
  for (int d : assoc.unmatched_detections) {
    Live l;
    l.track.track_id = next_id_++;
    l.track.detections.push_back(dets[d]);
    l.filter = initiate(dets[d].bbox, params_.noise);
    live_.push_back(std::move(l));
  }
}

std::vector<Track> MultiTracker::finish() {
  while (!live_.empty()) retire(live_.size() - 1);
  std::vector<Track> out = std::move(done_);
  done_.clear();
  std::sort(out.begin(), out.end(),
            [](const Track& a, const Track& b) { return a.track_id < b.track_id; });
  return out;
}

std::vector<Track> run_tracking(std::span<const FrameRecord> frames, const TrackerParams& params,
                                TrackerDebug* debug) {
  MultiTracker tracker(params);
  tracker.set_debug(debug);
  for (std::size_t i = 0; i < frames.size();) {
    // Records sharing a frame index are one frame.
    std::size_t j = i + 1;
    while (j < frames.size() && frames[j].frame_index == frames[i].frame_index) ++j;
    if (j == i + 1) {
      tracker.step(frames[i]);
    } else {
      FrameRecord joined{frames[i].frame_index, {}};
      for (std::size_t k = i; k < j; ++k) {
        joined.detections.insert(joined.detections.end(), frames[k].detections.begin(),
                                 frames[k].detections.end());
      }
      tracker.step(joined);
    }
    i = j;
  }
  return tracker.finish();
}

}  // namespace shopsense
