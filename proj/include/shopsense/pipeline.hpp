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

// End-to-end analysis of one detection stream:
//
//   track -> re-identify -> roles -> consolidate employee -> segment
//         -> aggregate -> classify (second pass, needs D_avg) -> verify
//
// plus the job-demands report it writes.

#pragma once

#include <string>
#include <vector>

#include "shopsense/config.hpp"
#include "shopsense/encounters.hpp"
#include "shopsense/ingest.hpp"
#include "shopsense/interactions.hpp"
#include "shopsense/reid.hpp"
#include "shopsense/tracker.hpp"

namespace shopsense {

struct PipelineResult {
  std::string source_id;
  RunConfig config;
  Calibration calibration;
  RoiConfig roi;
  JobDemands job_demands;
  std::vector<Classification> classifications;  // parallel to job_demands.S
  bool degraded = false;
  Diagnostics diagnostics;

  std::size_t raw_tracks = 0;
  std::size_t reid_tracks = 0;
  std::vector<MergeEvent> merges;
  std::vector<Track> tracks;  // final, with roles

  TrackerDebug tracker_debug;      // filled when requested
  std::vector<Track> tracker_output;  // pre-merge tracks, when requested
};

struct PipelineOptions {
  bool debug = false;
};

// Throws the module errors; a missing employee is reported through
// `degraded` instead.
PipelineResult run_pipeline(const DetectionStream& stream, const RunConfig& config,
                            const PipelineOptions& options = {});

// jobdemands.json; byte-identical for identical inputs.
std::string report_json(const PipelineResult& r);
std::string report_summary(const PipelineResult& r);

// The parts of a job-demands report the evaluator needs.
struct ReportDigest {
  std::string source_id;
  double fps = 0;
  JobDemands job_demands;
};
ReportDigest parse_report(std::string_view text);  // throws SchemaError

}  // namespace shopsense
