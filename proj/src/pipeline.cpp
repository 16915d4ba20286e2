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

#include "shopsense/pipeline.hpp"

#include <cstdio>
#include <sstream>

#include "json_util.hpp"
#include "shopsense/evaluate.hpp"
#include "shopsense/roles.hpp"

namespace shopsense {

PipelineResult run_pipeline(const DetectionStream& stream, const RunConfig& config,
                            const PipelineOptions& options) {
  config.validate();
  PipelineResult r;
  r.source_id = stream.header.source_id;
  r.config = config;
  r.calibration = stream.header.calibration;
  r.roi = stream.header.roi;
  if (config.fps) r.calibration.fps = *config.fps;
  if (config.meters_per_pixel) r.calibration.meters_per_pixel = *config.meters_per_pixel;
  if (config.roi_y) r.roi.y_line = *config.roi_y;
  r.roi.employee_capacity = config.employee_capacity;
  r.calibration.validate();
  r.roi.validate(r.calibration);

  std::vector<Track> tracks =
      run_tracking(stream.frames, config.tracker, options.debug ? &r.tracker_debug : nullptr);
  r.raw_tracks = tracks.size();
  if (options.debug) r.tracker_output = tracks;
  if (config.reid_enabled) {
    MergeReport report;
    tracks = merge_pass(tracks, config.reid, &report);
    r.merges = std::move(report.merges);
    if (report.dropped_conflicts > 0) {
      note(&r.diagnostics, "reid-frame-conflicts",
           std::to_string(report.dropped_conflicts) + " detections lost to same-frame conflicts");
    }
  }
  r.reid_tracks = tracks.size();
  tracks = assign_roles(tracks, r.roi);
  tracks = consolidate_employees(tracks, r.roi, &r.diagnostics);
  const Track* employee = find_employee(tracks);
  if (!employee) r.degraded = true;

  std::vector<Encounter> encounters;
  if (config.mode == SegmentationMode::Presence) {
    encounters = segment_presence(tracks, r.calibration);
  } else {
    try {
      ProximityResult p = segment_proximity(tracks, r.calibration, config.proximity);
      encounters = std::move(p.encounters);
      r.degraded = r.degraded || p.degraded;
      r.diagnostics.insert(r.diagnostics.end(), p.diagnostics.begin(), p.diagnostics.end());
    } catch (const NoEmployee& e) {
      r.degraded = true;
      note(&r.diagnostics, "no-employee", e.what());
    }
  }

  const std::int64_t frames = stream.frames.empty() ? 0 : stream.frames.back().frame_index + 1;
  r.job_demands = aggregate(std::move(encounters), static_cast<double>(frames) / r.calibration.fps / 60.0);

  // Second pass: every rule compares against the mean of the full set.
  const double d_avg_s = r.job_demands.D_avg_min * 60.0;
  for (Encounter& e : r.job_demands.S) {
    std::vector<Track> customers;
    for (const Track& t : tracks) {
      if (e.customer_track_ids.contains(t.track_id)) customers.push_back(t);
    }
    ClassificationContext ctx{d_avg_s, employee, customers, r.roi, r.calibration};
    Classification c = classify_encounter(e, ctx, config.interactions);
    e.cls = c.cls;
    for (Diagnostic& d : c.diagnostics) {
      d.message = "encounter " + std::to_string(e.id) + ": " + d.message;
      r.diagnostics.push_back(d);
    }
    r.classifications.push_back(std::move(c));
  }
  verify(r.job_demands, r.calibration);
  r.tracks = std::move(tracks);
  return r;
}

namespace {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;
using detail::round6;

}  // namespace

std::string report_json(const PipelineResult& r) {
  ojson j;
  j["source_id"] = r.source_id;
  j["mode"] = std::string(to_string(r.config.mode));
  j["degraded"] = r.degraded;
  j["calibration"] = {{"fps", r.calibration.fps},
                      {"meters_per_pixel", r.calibration.meters_per_pixel},
                      {"frame_width", r.calibration.frame_width},
                      {"frame_height", r.calibration.frame_height},
                      {"roi_y", r.roi.y_line}};
  const JobDemands& jd = r.job_demands;
  j["job_demands"] = {{"T_min", round6(jd.T_min)},
                      {"C", jd.C},
                      {"n_encounters", jd.S.size()},
                      {"D_total_min", round6(jd.D_total_min)},
                      {"D_avg_min", round6(jd.D_avg_min)}};
  ojson encs = ojson::array();
  for (std::size_t i = 0; i < jd.S.size(); ++i) {
    const Encounter& e = jd.S[i];
    ojson ej;
    ej["id"] = e.id;
    ej["start_frame"] = e.start_frame;
    ej["end_frame"] = e.end_frame;
    ej["duration_s"] = round6(e.duration_s);
    ej["n_customers"] = e.n_customers;
    ej["customer_track_ids"] = e.customer_track_ids;
    ej["class"] = std::string(to_string(e.cls));
    if (i < r.classifications.size()) {
      ej["rule"] = r.classifications[i].rule;
      ej["pose_duration_s"] = round6(r.classifications[i].pose_duration_s);
    }
    encs.push_back(std::move(ej));
  }
  j["encounters"] = std::move(encs);
  std::size_t customers = 0, employees = 0;
  for (const Track& t : r.tracks) {
    customers += t.role == Role::Customer;
    employees += t.role == Role::Employee;
  }
  j["tracks"] = {{"raw", r.raw_tracks},
                 {"after_reid", r.reid_tracks},
                 {"customers", customers},
                 {"employees", employees}};
  ojson merges = ojson::array();
  for (const MergeEvent& m : r.merges) {
    merges.push_back({{"kept", m.kept}, {"absorbed", m.absorbed}, {"score", round6(m.score)}});
  }
  j["merges"] = std::move(merges);
  ojson diags = ojson::array();
  for (const Diagnostic& d : r.diagnostics) diags.push_back({{"code", d.code}, {"message", d.message}});
  j["diagnostics"] = std::move(diags);
  j["config"] = ojson::parse(config_to_json(r.config));
  return j.dump(2) + "\n";
}

std::string report_summary(const PipelineResult& r) {
  std::ostringstream out;
  const JobDemands& jd = r.job_demands;
  char line[160];
  out << "source: " << (r.source_id.empty() ? "(unnamed)" : r.source_id) << "\n";
  out << "mode: " << to_string(r.config.mode) << (r.degraded ? "  [DEGRADED]" : "") << "\n";
  std::snprintf(line, sizeof line, "footage: %.2f min\n", jd.T_min);
  out << line;
  out << "customers (C): " << jd.C << "\n";
  out << "encounters: " << jd.S.size() << "\n";
  std::snprintf(line, sizeof line, "total duration: %s  average: %s\n",
                format_mss(jd.D_total_min * 60).c_str(), format_mss(jd.D_avg_min * 60).c_str());
  out << line;
  for (std::size_t i = 0; i < jd.S.size(); ++i) {
    const Encounter& e = jd.S[i];
    std::snprintf(line, sizeof line, "  #%d  frames %lld-%lld  %s  n=%d  %s", e.id,
                  static_cast<long long>(e.start_frame), static_cast<long long>(e.end_frame),
                  format_mss(e.duration_s).c_str(), e.n_customers,
                  std::string(to_string(e.cls)).c_str());
    out << line;
    if (i < r.classifications.size()) out << " (" << r.classifications[i].rule << ")";
    out << "\n";
  }
  for (const Diagnostic& d : r.diagnostics) out << "note [" << d.code << "] " << d.message << "\n";
  return out.str();
}

ReportDigest parse_report(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed report JSON: ") + e.what());
  }
  ReportDigest d;
  try {
    d.source_id = j.at("source_id").get<std::string>();
    d.fps = j.at("calibration").at("fps").get<double>();
    const json& jd = j.at("job_demands");
    d.job_demands.T_min = jd.at("T_min").get<double>();
    d.job_demands.C = jd.at("C").get<int>();
    d.job_demands.D_total_min = jd.at("D_total_min").get<double>();
    d.job_demands.D_avg_min = jd.at("D_avg_min").get<double>();
    for (const json& ej : j.at("encounters")) {
      Encounter e;
      e.id = ej.at("id").get<int>();
      e.start_frame = ej.at("start_frame").get<std::int64_t>();
      e.end_frame = ej.at("end_frame").get<std::int64_t>();
      e.duration_s = ej.at("duration_s").get<double>();
      e.n_customers = ej.at("n_customers").get<int>();
      e.customer_track_ids = ej.at("customer_track_ids").get<std::set<int>>();
      auto cls = parse_interaction_class(ej.at("class").get<std::string>());
      if (!cls) throw SchemaError("unknown encounter class in report");
      e.cls = *cls;
      d.job_demands.S.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("job-demands report: ") + e.what());
  }
  if (!(d.fps > 0)) throw SchemaError("job-demands report: fps must be > 0");
  return d;
}

}  // namespace shopsense
