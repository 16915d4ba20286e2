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

#include "shopsense/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "json_util.hpp"

namespace shopsense {

double temporal_iou(std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) noexcept {
  const std::int64_t inter = std::min(a1, b1) - std::max(a0, b0) + 1;
  if (inter <= 0) return 0.0;
  const std::int64_t uni = (a1 - a0 + 1) + (b1 - b0 + 1) - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<EncounterMatch> match_encounters(std::span<const Encounter> pred,
                                             std::span<const GroundTruthEncounter> gt,
                                             double tiou_min) {
  std::vector<EncounterMatch> cand;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < gt.size(); ++j) {
      const double t = temporal_iou(pred[i].start_frame, pred[i].end_frame, gt[j].start_frame,
                                    gt[j].end_frame);
      if (t >= tiou_min && t > 0) cand.push_back({static_cast<int>(i), static_cast<int>(j), t});
    }
  }
  std::stable_sort(cand.begin(), cand.end(),
                   [](const EncounterMatch& a, const EncounterMatch& b) { return a.tiou > b.tiou; });
  std::vector<bool> pu(pred.size(), false), gu(gt.size(), false);
  std::vector<EncounterMatch> out;
  for (const EncounterMatch& m : cand) {
    if (pu[m.pred] || gu[m.gt]) continue;
    pu[m.pred] = gu[m.gt] = true;
    out.push_back(m);
  }
  std::sort(out.begin(), out.end(),
            [](const EncounterMatch& a, const EncounterMatch& b) { return a.gt < b.gt; });
  return out;
}

CountMetrics count_metrics(int c_true, int c_pred, int matched) {
  if (c_true < 0 || c_pred < 0 || matched < 0 || matched > std::min(c_true, c_pred)) {
    throw InvalidValue("count_metrics needs 0 <= matched <= min(c_true, c_pred)");
  }
  CountMetrics m;
  const int hi = std::max(c_true, c_pred);
  m.accuracy = hi == 0 ? 1.0 : static_cast<double>(std::min(c_true, c_pred)) / hi;
  m.recall = c_true == 0 ? 1.0 : static_cast<double>(matched) / c_true;
  return m;
}

double duration_error(double d_true, double d_pred) {
  if (!(d_true > 0)) throw ZeroTruth("duration_error needs a positive true duration");
  return std::abs(d_pred - d_true) / d_true;
}

namespace {

int class_index(InteractionClass c) {
  switch (c) {
    case InteractionClass::Positive: return 0;
    case InteractionClass::Neutral: return 1;
    case InteractionClass::Negative: return 2;
    default: return -1;
  }
}

}  // namespace

EvalReport evaluate(const JobDemands& pred, const GroundTruth& gt, double fps, double tiou_min) {
  EvalReport r;
  r.video_id = gt.video_id;
  r.c_true = gt.customer_count;
  r.c_pred = pred.C;
  const auto matches = match_encounters(pred.S, gt.encounters, tiou_min);
  int matched = 0;
  for (const EncounterMatch& m : matches) {
    matched += std::min(pred.S[m.pred].n_customers, gt.encounters[m.gt].n_customers);
    const int gi = class_index(gt.encounters[m.gt].cls);
    const int pi = class_index(pred.S[m.pred].cls);
    if (gi >= 0 && pi >= 0) ++r.class_confusion[gi][pi];
  }
  r.matched = std::min({matched, r.c_true, r.c_pred});
  const CountMetrics cm = count_metrics(r.c_true, r.c_pred, r.matched);
  r.count_accuracy = cm.accuracy;
  r.recall = cm.recall;

  double total = 0;
  int positives = 0;
  for (const GroundTruthEncounter& g : gt.encounters) {
    total += frames_to_seconds(g.start_frame, g.end_frame, fps);
    positives += g.cls == InteractionClass::Positive;
  }
  r.d_avg_true_s = gt.encounters.empty() ? 0.0 : total / static_cast<double>(gt.encounters.size());
  r.positive_ratio_true =
      gt.encounters.empty() ? 0.0 : static_cast<double>(positives) / gt.encounters.size();
  r.d_avg_pred_s = pred.D_avg_min * 60.0;
  r.duration_error = r.d_avg_true_s > 0 ? duration_error(r.d_avg_true_s, r.d_avg_pred_s) : 0.0;
  int pred_pos = 0;
  for (const Encounter& e : pred.S) pred_pos += e.cls == InteractionClass::Positive;
  r.positive_ratio_pred = pred.S.empty() ? 0.0 : static_cast<double>(pred_pos) / pred.S.size();
  return r;
}

std::string to_json(const EvalReport& r) {
  using detail::round6;
  nlohmann::ordered_json j;
  j["video_id"] = r.video_id;
  j["c_true"] = r.c_true;
  j["c_pred"] = r.c_pred;
  j["matched"] = r.matched;
  j["count_accuracy"] = round6(r.count_accuracy);
  j["recall"] = round6(r.recall);
  j["d_avg_true_s"] = round6(r.d_avg_true_s);
  j["d_avg_pred_s"] = round6(r.d_avg_pred_s);
  j["duration_error"] = round6(r.duration_error);
  nlohmann::ordered_json conf = nlohmann::ordered_json::array();
  for (const auto& row : r.class_confusion) conf.push_back(row);
  j["class_confusion"] = std::move(conf);
  j["class_order"] = {"positive", "neutral", "negative"};
  j["positive_ratio_true"] = round6(r.positive_ratio_true);
  j["positive_ratio_pred"] = round6(r.positive_ratio_pred);
  return j.dump(2) + "\n";
}

EvalReport eval_from_json(std::string_view text) {
  EvalReport r;
  try {
    const auto j = nlohmann::json::parse(text);
    r.video_id = j.at("video_id").get<std::string>();
    r.c_true = j.at("c_true").get<int>();
    r.c_pred = j.at("c_pred").get<int>();
    r.matched = j.at("matched").get<int>();
    r.count_accuracy = j.at("count_accuracy").get<double>();
    r.recall = j.at("recall").get<double>();
    r.d_avg_true_s = j.at("d_avg_true_s").get<double>();
    r.d_avg_pred_s = j.at("d_avg_pred_s").get<double>();
    r.duration_error = j.at("duration_error").get<double>();
    r.class_confusion = j.at("class_confusion").get<std::array<std::array<int, 3>, 3>>();
    r.positive_ratio_true = j.at("positive_ratio_true").get<double>();
    r.positive_ratio_pred = j.at("positive_ratio_pred").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("eval report: ") + e.what());
  }
  return r;
}

std::string format_mss(double seconds) {
  const long total = std::lround(std::max(0.0, seconds));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%ld:%02ld", total / 60, total % 60);
  return buf;
}

namespace {

std::string pct(double x) { return std::to_string(std::lround(100.0 * x)) + "%"; }

}  // namespace

void write_table_csv(std::span<const EvalReport> reports, std::ostream& out) {
  out << "video,customers_true,customers_pred,accuracy,recall,duration_true,duration_pred,"
         "duration_error,positive_ratio_true,positive_ratio_pred\n";
  double acc = 0, rec = 0, dt = 0, dp = 0, de = 0, prt = 0, prp = 0;
  for (const EvalReport& r : reports) {
    out << r.video_id << ',' << r.c_true << ',' << r.c_pred << ',' << pct(r.count_accuracy) << ','
        << pct(r.recall) << ',' << format_mss(r.d_avg_true_s) << ',' << format_mss(r.d_avg_pred_s)
        << ',' << pct(r.duration_error) << ',' << pct(r.positive_ratio_true) << ','
        << pct(r.positive_ratio_pred) << '\n';
    acc += r.count_accuracy;
    rec += r.recall;
    dt += r.d_avg_true_s;
    dp += r.d_avg_pred_s;
    de += r.duration_error;
    prt += r.positive_ratio_true;
    prp += r.positive_ratio_pred;
  }
  if (reports.size() > 1) {
    const double n = static_cast<double>(reports.size());
    out << "average,,," << pct(acc / n) << ',' << pct(rec / n) << ',' << format_mss(dt / n) << ','
        << format_mss(dp / n) << ',' << pct(de / n) << ',' << pct(prt / n) << ','
        << pct(prp / n) << '\n';
  }
}

}  // namespace shopsense
