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

// shopsense: simulate | analyze | evaluate | report
//
// Exit codes: 0 ok, 1 at least one analysis ran degraded (no usable
// employee track or low employee coverage), 2 usage, input or any other error.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "shopsense/config.hpp"
#include "shopsense/evaluate.hpp"
#include "shopsense/ingest.hpp"
#include "shopsense/pipeline.hpp"
#include "shopsense/simgen.hpp"

namespace fs = std::filesystem;
using namespace shopsense;

namespace {

constexpr int kOk = 0, kDegraded = 1, kFailed = 2;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + p.string());
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; returns the worst exit
// code. Errors are printed as they happen.
template <typename Fn>
int parallel(std::size_t n, int jobs, Fn fn) {
  std::atomic<std::size_t> next{0};
  std::atomic<int> worst{kOk};
  std::mutex log;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      int code = kOk;
      try {
        code = fn(i);
      } catch (const std::exception& e) {
        std::lock_guard lock(log);
        std::cerr << "error: " << e.what() << "\n";
        code = kFailed;
      }
      int cur = worst.load();
      while (code > cur && !worst.compare_exchange_weak(cur, code)) {
      }
    }
  };
  const auto count = static_cast<std::size_t>(std::max(1, jobs));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < std::min(count, n); ++t) pool.emplace_back(worker);
    worker();
  }
  return worst.load();
}

struct Options {
  std::string config_path;
  std::string mode;
  std::optional<double> roi_y, fps, mpp;
  int jobs = 1;
  bool debug_dumps = false;
  std::string out = ".";
};

RunConfig resolve_config(const Options& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : read_config_file(o.config_path);
  if (!o.mode.empty()) {
    auto m = parse_segmentation_mode(o.mode);
    if (!m) throw ConfigError("--mode must be presence or proximity");
    c.mode = *m;
  }
  if (o.roi_y) c.roi_y = o.roi_y;
  if (o.fps) c.fps = o.fps;
  if (o.mpp) c.meters_per_pixel = o.mpp;
  c.validate();
  return c;
}

int cmd_simulate(const std::vector<std::string>& names, const Options& o,
                 std::optional<std::uint64_t> seed, bool noise_free) {
  return parallel(names.size(), o.jobs, [&](std::size_t i) {
    const std::string& name = names[i];
    ScenarioSpec spec = fs::exists(name) && fs::is_regular_file(name)
                            ? scenario_from_json(slurp(name))
                            : builtin_scenario(name);
    NoiseSpec noise = noise_free ? NoiseSpec{} : spec.noise;
    if (seed) noise.seed = *seed;
    const Scenario sc = generate(spec, noise);
    const fs::path dir(o.out);
    spit(dir / (spec.name + ".jsonl"), emit_stream(sc.stream));
    std::ostringstream gt;
    emit_annotations(sc.truth, gt);
    spit(dir / (spec.name + ".gt.json"), gt.str());
    return kOk;
  });
}

int cmd_analyze(const std::vector<std::string>& streams, const Options& o) {
  const RunConfig config = resolve_config(o);
  return parallel(streams.size(), o.jobs, [&](std::size_t i) {
    const fs::path in(streams[i]);
    if (!fs::exists(in)) throw SchemaError("no such stream file: " + in.string());
    const DetectionStream stream = read_stream_file(in);
    const PipelineResult r = run_pipeline(stream, config, {o.debug_dumps});
    const fs::path dir = streams.size() == 1 ? fs::path(o.out) : fs::path(o.out) / in.stem();
    spit(dir / "jobdemands.json", report_json(r));
    spit(dir / "summary.txt", report_summary(r));
    if (o.debug_dumps) {
      std::ostringstream csv;
      r.tracker_debug.write_csv(csv);
      spit(dir / "tracker_debug.csv", csv.str());
      std::ostringstream sim;
      write_similarity_csv(r.tracker_output, config.reid, sim);
      spit(dir / "similarity.csv", sim.str());
    }
    if (r.degraded) {
      std::cerr << in.string() << ": degraded, see diagnostics in the report\n";
      return kDegraded;
    }
    return kOk;
  });
}

int cmd_evaluate(const std::string& report_path, const std::string& gt_path, const Options& o) {
  const ReportDigest d = parse_report(slurp(report_path));
  const GroundTruth gt = read_annotations_file(gt_path);
  if (!gt.video_id.empty() && !d.source_id.empty() && gt.video_id != d.source_id) {
    throw SchemaError("video id mismatch: report \"" + d.source_id + "\" vs annotations \"" +
                      gt.video_id + "\"");
  }
  const RunConfig config = resolve_config(o);
  EvalReport r = evaluate(d.job_demands, gt, d.fps, config.tiou_min);
  if (r.video_id.empty()) r.video_id = d.source_id;
  const fs::path dir(o.out);
  spit(dir / "eval.json", to_json(r));
  std::ostringstream csv;
  write_table_csv(std::span<const EvalReport>(&r, 1), csv);
  spit(dir / "eval.csv", csv.str());
  return kOk;
}

int cmd_report(const std::vector<std::string>& evals, const Options& o) {
  std::vector<EvalReport> rows;
  for (const auto& p : evals) rows.push_back(eval_from_json(slurp(p)));
  std::ostringstream csv;
  write_table_csv(rows, csv);
  if (o.out == "-") {
    std::cout << csv.str();
  } else {
    spit(o.out, csv.str());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Job-demand analytics from person-detection streams"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "RunConfig JSON")->check(CLI::ExistingFile);
    sub->add_option("--mode", o.mode, "presence | proximity");
    sub->add_option("--roi-y", o.roi_y, "ROI line override (px)");
    sub->add_option("--fps", o.fps, "frame rate override");
    sub->add_option("--mpp", o.mpp, "meters per pixel override");
    sub->add_option("--jobs", o.jobs, "parallel workers")->check(CLI::PositiveNumber);
    sub->add_flag("--debug-dumps", o.debug_dumps, "write per-stage CSV dumps");
  };

  std::vector<std::string> names;
  std::optional<std::uint64_t> seed;
  bool noise_free = false;
  bool list = false;
  auto* sim = app.add_subcommand("simulate", "render scenarios to stream + ground truth");
  sim->add_option("scenario", names, "builtin name or scenario JSON path");
  sim->add_option("--out", o.out, "output directory")->capture_default_str();
  sim->add_option("--seed", seed, "noise seed override");
  sim->add_flag("--noise-free", noise_free, "ignore the scenario's default noise");
  sim->add_flag("--list", list, "print builtin scenario names");
  sim->add_option("--jobs", o.jobs, "parallel workers")->check(CLI::PositiveNumber);

  std::vector<std::string> streams;
  auto* analyze = app.add_subcommand("analyze", "run the pipeline on detection streams");
  analyze->add_option("stream", streams, "detection stream (.jsonl)")->required();
  analyze->add_option("--out", o.out, "output directory")->capture_default_str();
  add_common(analyze);

  std::string report_path, gt_path;
  auto* eval = app.add_subcommand("evaluate", "compare a job-demands report to annotations");
  eval->add_option("jobdemands", report_path, "jobdemands.json")->required();
  eval->add_option("annotations", gt_path, "annotation JSON")->required();
  eval->add_option("--out", o.out, "output directory")->capture_default_str();
  eval->add_option("--config", o.config_path, "RunConfig JSON")->check(CLI::ExistingFile);

  std::vector<std::string> evals;
  auto* report = app.add_subcommand("report", "merge eval.json files into one table");
  report->add_option("eval", evals, "eval.json files")->required();
  report->add_option("--out", o.out, "CSV path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kFailed;
  }
  if (report->parsed() && report->count("--out") == 0) o.out = "-";

  try {
    if (sim->parsed()) {
      if (list || names.empty()) {
        for (const auto& n : builtin_names()) std::cout << n << "\n";
        return names.empty() && !list ? kFailed : kOk;
      }
      return cmd_simulate(names, o, seed, noise_free);
    }
    if (analyze->parsed()) return cmd_analyze(streams, o);
    if (eval->parsed()) return cmd_evaluate(report_path, gt_path, o);
    if (report->parsed()) return cmd_report(evals, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kFailed;
}
