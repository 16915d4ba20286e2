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

#include "shopsense/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "json_util.hpp"

namespace shopsense {
namespace {

// std distributions are implementation-defined; these keep streams
// byte-identical across standard libraries.
std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return splitmix(a ^ splitmix(b)); }

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double gaussian(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool in_ranges(std::int64_t f, const std::vector<FrameRange>& ranges) {
  for (auto [a, b] : ranges) {
    if (f >= a && f <= b) return true;
  }
  return false;
}

BBox box_at(const AgentSpec& a, const Eigen::Vector2d& foot) {
  return BBox(foot.x(), foot.y() - a.height / 2, a.width, a.height);
}

// Stick figure, in box-relative coordinates (0,0 top-left, 1,1 bottom-right).
constexpr std::array<std::array<double, 2>, kPoseKeypoints> kFigure = {{
    {0.50, 0.075}, {0.47, 0.06}, {0.45, 0.06}, {0.43, 0.06}, {0.53, 0.06}, {0.55, 0.06},
    {0.57, 0.06},  {0.40, 0.07}, {0.60, 0.07}, {0.47, 0.10}, {0.53, 0.10}, {0.30, 0.20},
    {0.70, 0.20},  {0.25, 0.35}, {0.75, 0.35}, {0.25, 0.50}, {0.75, 0.50}, {0.24, 0.53},
    {0.76, 0.53},  {0.25, 0.54}, {0.75, 0.54}, {0.27, 0.52}, {0.73, 0.52}, {0.40, 0.52},
    {0.60, 0.52},  {0.40, 0.75}, {0.60, 0.75}, {0.40, 0.95}, {0.60, 0.95}, {0.39, 0.98},
    {0.61, 0.98},  {0.42, 1.00}, {0.58, 1.00},
}};
constexpr double kPoseVisibility = 0.9;

Pose stick_figure(const BBox& b) {
  Pose p;
  for (std::size_t i = 0; i < kPoseKeypoints; ++i) {
    p[i] = {b.x1() + kFigure[i][0] * b.w(), b.y1() + kFigure[i][1] * b.h(), kPoseVisibility};
  }
  return p;
}

// Both hands placed just above `target`'s nose.
void reach_head(Pose& p, const Pose& target, double offset_px) {
  const double nx = target[landmark::kNose].x;
  const double ny = target[landmark::kNose].y - offset_px;
  for (std::size_t i = 15; i <= 22; ++i) {
    const double side = i % 2 == 1 ? -1.0 : 1.0;
    const double spread = (i == landmark::kLeftIndex || i == landmark::kRightIndex) ? 0.0 : 2.0;
    p[i] = {nx + side * spread, ny - spread, kPoseVisibility};
  }
}

Eigen::VectorXd base_embedding(std::uint64_t seed, int dim) {
  std::mt19937_64 rng(splitmix(seed));
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gaussian(rng);
  return v.normalized();
}

Eigen::VectorXd round7(Eigen::VectorXd v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = std::round(v[i] * 1e7) / 1e7;
    if (v[i] == 0) v[i] = 0.0;
  }
  return v;
}

constexpr std::array<std::uint8_t, 3> kSkin = {224, 172, 105};

RgbPatch render_patch(const ScenarioSpec& spec, const AgentSpec& a, std::mt19937_64& rng) {
  RgbPatch p;
  p.width = spec.patch_width;
  p.height = spec.patch_height;
  p.rgb.resize(static_cast<std::size_t>(p.width) * p.height * 3);
  const int head_rows = static_cast<int>(std::lround(0.15 * p.height));
  std::size_t k = 0;
  for (int y = 0; y < p.height; ++y) {
    const auto& base = y < head_rows ? kSkin : a.appearance.rgb;
    for (int x = 0; x < p.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const int jitter = static_cast<int>(rng() % 25) - 12;
        p.rgb[k++] = static_cast<std::uint8_t>(std::clamp(int(base[c]) + jitter, 0, 255));
      }
    }
  }
  return p;
}

}  // namespace

void NoiseSpec::validate() const {
  if (!(miss_prob >= 0 && miss_prob <= 1)) throw SpecError("noise.miss_prob must be in [0,1]");
  if (!(jitter_px >= 0)) throw SpecError("noise.jitter_px must be >= 0");
  if (!(occlusion_iou > 0 && occlusion_iou <= 1)) {
    throw SpecError("noise.occlusion_iou must be in (0,1]");
  }
  for (const auto* ranges : {&employee_dropout, &employee_pose_dropout}) {
    for (auto [a, b] : *ranges) {
      if (a < 0 || b < a) throw SpecError("noise dropout ranges must satisfy 0 <= start <= end");
    }
  }
}

void ScenarioSpec::validate() const {
  try {
    layout.cal.validate();
    RoiConfig{layout.roi_y, 1}.validate(layout.cal);
  } catch (const Error& e) {
    throw SpecError(std::string("layout: ") + e.what());
  }
  if (duration_frames <= 0) throw SpecError("duration_frames must be > 0");
  if (emit_embeddings && embedding_dim < 1) throw SpecError("embedding_dim must be >= 1");
  if (emit_patches && (patch_width < 1 || patch_height < 1)) throw SpecError("patch size must be >= 1");
  if (!(embedding_noise >= 0)) throw SpecError("embedding_noise must be >= 0");
  noise.validate();
  const double fw = layout.cal.frame_width, fh = layout.cal.frame_height;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const AgentSpec& a = agents[i];
    const std::string who = "agent " + std::to_string(i);
    if (!(a.width > 0 && a.height > 0)) throw SpecError(who + ": box size must be > 0");
    if (a.entry_frame < 0) throw SpecError(who + ": entry_frame must be >= 0");
    if (a.role == Role::Unknown) throw SpecError(who + ": role must be customer or employee");
    auto check = [&](const Eigen::Vector2d& p) {
      if (p.x() - a.width / 2 < 0 || p.x() + a.width / 2 > fw || p.y() - a.height < 0 ||
          p.y() > fh) {
        throw SpecError(who + ": waypoint (" + std::to_string(p.x()) + ", " +
                        std::to_string(p.y()) + ") puts the box outside the frame");
      }
    };
    check(a.start);
    for (const Leg& l : a.legs) {
      if (l.kind == Leg::Kind::Move) {
        check(l.to);
        if (!(l.speed > 0)) throw SpecError(who + ": move speed must be > 0");
      } else if (l.frames < 0) {
        throw SpecError(who + ": leg length must be >= 0");
      }
    }
    if (a.role == Role::Employee && !(a.start.y() < layout.roi_y)) {
      throw SpecError(who + ": employees must start in the staff area");
    }
    for (const PoseEvent& e : a.pose_events) {
      if (e.target_agent < 0 || static_cast<std::size_t>(e.target_agent) >= agents.size() ||
          static_cast<std::size_t>(e.target_agent) == i) {
        throw SpecError(who + ": pose event targets an invalid agent");
      }
      if (e.end < e.start || !(e.offset_m >= 0)) throw SpecError(who + ": malformed pose event");
    }
  }
}

AgentPath agent_path(const AgentSpec& a, std::int64_t duration_frames) {
  AgentPath path;
  std::int64_t f = a.entry_frame;
  Eigen::Vector2d pos = a.start;
  auto push = [&](const Eigen::Vector2d& p) {
    if (f < duration_frames) {
      path.frames.push_back(f);
      path.feet.push_back(p);
    }
  };
  push(pos);
  for (const Leg& l : a.legs) {
    switch (l.kind) {
      case Leg::Kind::Move: {
        const Eigen::Vector2d from = pos;
        const double dist = (l.to - from).norm();
        const auto steps = static_cast<std::int64_t>(std::ceil(dist / l.speed - 1e-9));
        for (std::int64_t k = 1; k <= steps; ++k) {
          ++f;
          const double t = std::min(1.0, static_cast<double>(k) * l.speed / dist);
          push(k == steps ? l.to : Eigen::Vector2d(from + t * (l.to - from)));
        }
        pos = l.to;
        break;
      }
      case Leg::Kind::Wait:
        for (std::int64_t k = 0; k < l.frames; ++k) {
          ++f;
          push(pos);
        }
        break;
      case Leg::Kind::Hide:
        f += l.frames;
        break;
    }
  }
  return path;
}

Scenario generate(const ScenarioSpec& spec, const NoiseSpec& noise) {
  spec.validate();
  noise.validate();
  const std::size_t n = spec.agents.size();
  const auto frames = spec.duration_frames;

  // Dense per-agent visibility over the whole scenario.
  std::vector<std::vector<std::optional<Eigen::Vector2d>>> where(
      n, std::vector<std::optional<Eigen::Vector2d>>(static_cast<std::size_t>(frames)));
  Scenario out;
  out.truth.video_id = spec.name;
  for (std::size_t i = 0; i < n; ++i) {
    const AgentPath path = agent_path(spec.agents[i], frames);
    for (std::size_t k = 0; k < path.frames.size(); ++k) where[i][path.frames[k]] = path.feet[k];
    if (spec.agents[i].role == Role::Customer && !path.frames.empty()) {
      ++out.truth.customer_count;
      out.truth.encounters.push_back(
          {path.frames.front(), path.frames.back(), spec.agents[i].gt_class, 1});
    }
  }
  std::stable_sort(out.truth.encounters.begin(), out.truth.encounters.end(),
                   [](const auto& a, const auto& b) { return a.start_frame < b.start_frame; });

  std::vector<Eigen::VectorXd> bases;
  for (const AgentSpec& a : spec.agents) {
    bases.push_back(spec.emit_embeddings ? base_embedding(a.appearance.embedding_seed, spec.embedding_dim)
                                         : Eigen::VectorXd());
  }

  StreamHeader& h = out.stream.header;
  h.calibration = spec.layout.cal;
  h.roi = {spec.layout.roi_y, 1};
  h.embedding_dim = spec.emit_embeddings ? spec.embedding_dim : 0;
  h.source_id = spec.name;

  std::mt19937_64 noise_rng(splitmix(noise.seed));
  out.stream.frames.reserve(static_cast<std::size_t>(frames));
  std::vector<std::optional<BBox>> truth(n);
  std::vector<std::optional<Pose>> poses(n);
  for (std::int64_t f = 0; f < frames; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      truth[i].reset();
      poses[i].reset();
      if (where[i][f]) {
        truth[i] = box_at(spec.agents[i], *where[i][f]);
        poses[i] = stick_figure(*truth[i]);
      }
    }
    // Pose scripts read the target's unmodified figure.
    std::vector<std::optional<Pose>> scripted = poses;
    for (std::size_t i = 0; i < n; ++i) {
      if (!scripted[i]) continue;
      for (const PoseEvent& e : spec.agents[i].pose_events) {
        if (f < e.start || f > e.end || !poses[e.target_agent]) continue;
        reach_head(*scripted[i], *poses[e.target_agent], e.offset_m / spec.layout.cal.meters_per_pixel);
      }
    }

    std::vector<bool> hidden(n, false);
    if (noise.occlusion_iou < 1.0) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (!truth[i] || !truth[j] || iou(*truth[i], *truth[j]) <= noise.occlusion_iou) continue;
          // The box whose feet are higher in the image stands behind.
          hidden[truth[i]->y2() < truth[j]->y2() ? i : j] = true;
        }
      }
    }

    FrameRecord rec{f, {}};
    for (std::size_t i = 0; i < n; ++i) {
      if (!truth[i]) continue;
      const AgentSpec& a = spec.agents[i];
      const bool missed = uniform01(noise_rng) < noise.miss_prob;
      const double dx = gaussian(noise_rng) * noise.jitter_px;
      const double dy = gaussian(noise_rng) * noise.jitter_px;
      if (hidden[i] || missed) continue;
      if (a.role == Role::Employee && in_ranges(f, noise.employee_dropout)) continue;

      Detection d;
      d.frame_index = f;
      d.bbox = BBox(truth[i]->cx() + dx, truth[i]->cy() + dy, truth[i]->w(), truth[i]->h());
      d.confidence = 0.9;
      std::mt19937_64 look(mix(a.appearance.embedding_seed, static_cast<std::uint64_t>(f)));
      if (spec.emit_embeddings) {
        Eigen::VectorXd e = bases[i];
        const double sigma = spec.embedding_noise / std::sqrt(double(spec.embedding_dim));
        for (Eigen::Index k = 0; k < e.size(); ++k) e[k] += sigma * gaussian(look);
        d.embedding = round7(e.normalized());
      }
      if (spec.emit_patches) d.patch = render_patch(spec, a, look);
      if (spec.emit_poses &&
          !(a.role == Role::Employee && in_ranges(f, noise.employee_pose_dropout))) {
        d.pose = scripted[i];
      }
      rec.detections.push_back(std::move(d));
    }
    out.stream.frames.push_back(std::move(rec));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Builtin scenarios. Shared geometry: 640 x 480 at 15 fps, 1 cm per pixel,
// staff area above y = 240. The employee paces behind the counter at
// 1 px per frame (0.15 m/s) unless told to stand still.

namespace {

constexpr double kPaceLeft = 260, kPaceRight = 380, kStaffY = 200;
constexpr std::array<std::uint8_t, 3> kUniform = {50, 50, 60};

std::array<std::uint8_t, 3> palette(int i) {
  const double hue = std::fmod(0.11 + 0.618033988749895 * i, 1.0) * 6.0;
  const double s = 0.75, v = 0.85;
  const double c = v * s, x = c * (1 - std::abs(std::fmod(hue, 2.0) - 1)), m = v - c;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hue)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  auto q = [m](double u) { return static_cast<std::uint8_t>(std::lround((u + m) * 255)); };
  return {q(r), q(g), q(b)};
}

struct Pacer {
  double x = kPaceLeft;
  int dir = 1;

  // Appends Move legs covering exactly `frames` frames of pacing.
  void pace(std::vector<Leg>& legs, std::int64_t frames) {
    while (frames > 0) {
      const double bound = dir > 0 ? kPaceRight : kPaceLeft;
      const auto room = static_cast<std::int64_t>(std::abs(bound - x));
      if (room == 0) {
        dir = -dir;
        continue;
      }
      const std::int64_t step = std::min(room, frames);
      x += dir * static_cast<double>(step);
      legs.push_back(Leg::move(x, kStaffY, 1.0));
      frames -= step;
    }
  }
};

AgentSpec employee(std::int64_t duration) {
  AgentSpec a;
  a.role = Role::Employee;
  a.start = {kPaceLeft, kStaffY};
  a.width = 50;
  a.height = 120;
  a.appearance = {kUniform, 7};
  Pacer p;
  p.pace(a.legs, duration);
  return a;
}

// Entrance -> counter -> wait -> entrance. Visible for wait + 217 frames
// with the default layout.
AgentSpec visit(int idx, std::int64_t entry, std::int64_t wait, const Layout& layout,
                InteractionClass cls = InteractionClass::Neutral) {
  AgentSpec a;
  a.role = Role::Customer;
  a.entry_frame = entry;
  a.start = layout.entrance;
  a.legs = {Leg::move(layout.counter.x(), layout.counter.y(), 3.0), Leg::wait(wait),
            Leg::move(layout.entrance.x(), layout.entrance.y(), 3.0)};
  a.appearance = {palette(idx), 101 + static_cast<std::uint64_t>(idx)};
  a.gt_class = cls;
  return a;
}

ScenarioSpec base(const std::string& name, std::int64_t duration) {
  ScenarioSpec s;
  s.name = name;
  s.duration_frames = duration;
  s.agents.push_back(employee(duration));
  return s;
}

ScenarioSpec sequential(const std::string& name, std::int64_t duration,
                        const std::vector<std::pair<std::int64_t, std::int64_t>>& visits) {
  ScenarioSpec s = base(name, duration);
  for (std::size_t i = 0; i < visits.size(); ++i) {
    s.agents.push_back(visit(static_cast<int>(i), visits[i].first, visits[i].second, s.layout));
  }
  return s;
}

ScenarioSpec crossing() {
  ScenarioSpec s = base("crossing", 800);
  AgentSpec walker;
  walker.entry_frame = 20;
  walker.start = {40, 400};
  walker.legs = {Leg::move(600, 400, 1.0)};
  walker.appearance = {palette(0), 101};
  s.agents.push_back(walker);
  for (int i = 1; i <= 2; ++i) {
    AgentSpec stand;
    stand.start = {i == 1 ? 420.0 : 500.0, 380};
    stand.legs = {Leg::wait(700)};
    stand.appearance = {palette(i), 101 + static_cast<std::uint64_t>(i)};
    s.agents.push_back(stand);
  }
  s.noise.occlusion_iou = 0.3;
  return s;
}

ScenarioSpec re_entry() {
  ScenarioSpec s = base("re-entry", 1000);
  AgentSpec a = visit(0, 30, 200, s.layout);
  const Layout& l = s.layout;
  a.legs.push_back(Leg::hide(60));
  a.legs.push_back(Leg::move(l.counter.x(), l.counter.y(), 3.0));
  a.legs.push_back(Leg::wait(200));
  a.legs.push_back(Leg::move(l.entrance.x(), l.entrance.y(), 3.0));
  s.agents.push_back(a);
  return s;
}

ScenarioSpec fragmented_employee() {
  ScenarioSpec s;
  s.name = "fragmented-employee";
  s.duration_frames = 1500;
  AgentSpec e = employee(0);
  Pacer p;
  p.pace(e.legs, 300);
  e.legs.push_back(Leg::hide(45));
  p.pace(e.legs, 650);
  e.legs.push_back(Leg::hide(45));
  p.pace(e.legs, 500);
  s.agents.push_back(e);
  s.agents.push_back(visit(0, 100, 300, s.layout));
  s.agents.push_back(visit(1, 800, 300, s.layout));
  s.noise.employee_dropout = {{420, 490}, {1100, 1170}};
  s.noise.employee_pose_dropout = {{0, 1499}};
  return s;
}

ScenarioSpec long_positive() {
  ScenarioSpec s;
  s.name = "long-positive";
  s.duration_frames = 4700;
  const Layout& l = s.layout;
  // The long visit lasts 3390 frames (3:46); the employee stops pacing and
  // stands at the counter while that customer is served.
  constexpr std::int64_t long_entry = 800, long_wait = 3390 - 217;
  AgentSpec e = employee(0);
  Pacer p;
  p.pace(e.legs, long_entry + 108);
  e.legs.push_back(Leg::move(l.counter.x(), kStaffY, 1.0));
  const auto walk = static_cast<std::int64_t>(std::ceil(std::abs(l.counter.x() - p.x)));
  e.legs.push_back(Leg::wait(long_wait - walk));
  p.x = l.counter.x();
  p.pace(e.legs, s.duration_frames);
  s.agents.push_back(e);
  s.agents.push_back(visit(0, 30, 100, l));
  s.agents.push_back(visit(1, 400, 100, l));
  s.agents.push_back(visit(2, long_entry, long_wait, l, InteractionClass::Positive));
  s.agents.push_back(visit(3, 4300, 100, l));
  return s;
}

ScenarioSpec threat() {
  ScenarioSpec s = base("threat", 1200);
  AgentSpec a = visit(0, 50, 300, s.layout, InteractionClass::Negative);
  a.pose_events.push_back({250, 280, 0, 0.03});
  s.agents.push_back(a);
  s.agents.push_back(visit(1, 700, 200, s.layout));
  return s;
}

ScenarioSpec rush() {
  ScenarioSpec s = base("rush", 600);
  for (int i = 0; i < 14; ++i) {
    AgentSpec a;
    a.entry_frame = 5 * i;
    a.start = {170.0 + 45.0 * (i % 7), i < 7 ? 330.0 : 450.0};
    a.width = 40;
    a.height = 100;
    a.legs = {Leg::wait(400)};
    a.appearance = {palette(i), 101 + static_cast<std::uint64_t>(i)};
    s.agents.push_back(a);
  }
  return s;
}

ScenarioSpec workday() {
  std::vector<std::pair<std::int64_t, std::int64_t>> visits;
  for (int i = 0; i < 12; ++i) visits.push_back({50 + 800 * i, 200 + (53 * i) % 300});
  return sequential("workday", 10000, visits);
}

using Factory = ScenarioSpec (*)();

const std::map<std::string, Factory>& registry() {
  static const std::map<std::string, Factory> r = {
      {"single-customer", [] { return sequential("single-customer", 800, {{50, 300}}); }},
      {"three-customers",
       [] { return sequential("three-customers", 2000, {{30, 250}, {650, 400}, {1300, 300}}); }},
      {"five-customers",
       [] {
         return sequential("five-customers", 3000,
                           {{30, 200}, {600, 350}, {1200, 250}, {1800, 300}, {2400, 220}});
       }},
      {"crossing", crossing},
      {"re-entry", re_entry},
      {"fragmented-employee", fragmented_employee},
      {"long-positive", long_positive},
      {"threat", threat},
      {"rush", rush},
      {"workday", workday},
  };
  return r;
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& [name, f] : registry()) out.push_back(name);
  return out;
}

ScenarioSpec builtin_scenario(const std::string& name) {
  const auto& r = registry();
  auto it = r.find(name);
  if (it == r.end()) {
    std::string known;
    for (const auto& [k, f] : r) known += (known.empty() ? "" : ", ") + k;
    throw SpecError("unknown scenario \"" + name + "\"; builtins: " + known);
  }
  return it->second();
}

// ---------------------------------------------------------------------------
// JSON form.

namespace {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

ojson point(const Eigen::Vector2d& p) { return ojson::array({p.x(), p.y()}); }

Eigen::Vector2d point_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw SpecError(where + " must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

ojson ranges_json(const std::vector<FrameRange>& rs) {
  ojson a = ojson::array();
  for (auto [s, e] : rs) a.push_back({s, e});
  return a;
}

std::vector<FrameRange> ranges_from(const json& j, const std::string& where) {
  std::vector<FrameRange> out;
  if (!j.is_array()) throw SpecError(where + " must be a list of [start, end]");
  for (const json& r : j) {
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
      throw SpecError(where + " must be a list of [start, end]");
    }
    out.emplace_back(r[0].get<std::int64_t>(), r[1].get<std::int64_t>());
  }
  return out;
}

template <typename T>
T get(const json& j, const char* key, const T& fallback, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw SpecError(where + "." + key + " has the wrong type");
  }
}

}  // namespace

std::string scenario_to_json(const ScenarioSpec& s) {
  ojson j;
  j["name"] = s.name;
  j["layout"] = {{"fps", s.layout.cal.fps},
                 {"meters_per_pixel", s.layout.cal.meters_per_pixel},
                 {"frame_width", s.layout.cal.frame_width},
                 {"frame_height", s.layout.cal.frame_height},
                 {"roi_y", s.layout.roi_y},
                 {"counter", point(s.layout.counter)},
                 {"entrance", point(s.layout.entrance)}};
  j["duration_frames"] = s.duration_frames;
  j["embedding_dim"] = s.embedding_dim;
  j["patch"] = {s.patch_width, s.patch_height};
  j["emit"] = {{"embeddings", s.emit_embeddings}, {"patches", s.emit_patches}, {"poses", s.emit_poses}};
  j["embedding_noise"] = s.embedding_noise;
  j["noise"] = {{"miss_prob", s.noise.miss_prob},
                {"jitter_px", s.noise.jitter_px},
                {"occlusion_iou", s.noise.occlusion_iou},
                {"employee_dropout", ranges_json(s.noise.employee_dropout)},
                {"employee_pose_dropout", ranges_json(s.noise.employee_pose_dropout)},
                {"seed", s.noise.seed}};
  ojson agents = ojson::array();
  for (const AgentSpec& a : s.agents) {
    ojson legs = ojson::array();
    for (const Leg& l : a.legs) {
      switch (l.kind) {
        case Leg::Kind::Move: legs.push_back({{"move", point(l.to)}, {"speed", l.speed}}); break;
        case Leg::Kind::Wait: legs.push_back({{"wait", l.frames}}); break;
        case Leg::Kind::Hide: legs.push_back({{"hide", l.frames}}); break;
      }
    }
    ojson events = ojson::array();
    for (const PoseEvent& e : a.pose_events) {
      events.push_back({{"start", e.start}, {"end", e.end}, {"target", e.target_agent},
                        {"offset_m", e.offset_m}});
    }
    ojson aj;
    aj["role"] = std::string(to_string(a.role));
    aj["entry_frame"] = a.entry_frame;
    aj["start"] = point(a.start);
    aj["size"] = {a.width, a.height};
    aj["legs"] = std::move(legs);
    aj["rgb"] = a.appearance.rgb;
    aj["embedding_seed"] = a.appearance.embedding_seed;
    if (!events.empty()) aj["pose_events"] = std::move(events);
    aj["class"] = std::string(to_string(a.gt_class));
    agents.push_back(std::move(aj));
  }
  j["agents"] = std::move(agents);
  return j.dump(2) + "\n";
}

ScenarioSpec scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SpecError(std::string("malformed scenario JSON: ") + e.what());
  }
  if (!j.is_object()) throw SpecError("scenario must be a JSON object");
  ScenarioSpec s;
  s.name = get<std::string>(j, "name", "scenario", "scenario");
  if (auto it = j.find("layout"); it != j.end()) {
    const json& l = *it;
    s.layout.cal.fps = get(l, "fps", s.layout.cal.fps, "layout");
    s.layout.cal.meters_per_pixel = get(l, "meters_per_pixel", s.layout.cal.meters_per_pixel, "layout");
    s.layout.cal.frame_width = get(l, "frame_width", s.layout.cal.frame_width, "layout");
    s.layout.cal.frame_height = get(l, "frame_height", s.layout.cal.frame_height, "layout");
    s.layout.roi_y = get(l, "roi_y", s.layout.roi_y, "layout");
    if (l.contains("counter")) s.layout.counter = point_from(l["counter"], "layout.counter");
    if (l.contains("entrance")) s.layout.entrance = point_from(l["entrance"], "layout.entrance");
  }
  s.duration_frames = get<std::int64_t>(j, "duration_frames", 0, "scenario");
  s.embedding_dim = get(j, "embedding_dim", s.embedding_dim, "scenario");
  if (auto it = j.find("patch"); it != j.end()) {
    const auto wh = point_from(*it, "patch");
    s.patch_width = static_cast<int>(wh.x());
    s.patch_height = static_cast<int>(wh.y());
  }
  if (auto it = j.find("emit"); it != j.end()) {
    s.emit_embeddings = get(*it, "embeddings", true, "emit");
    s.emit_patches = get(*it, "patches", true, "emit");
    s.emit_poses = get(*it, "poses", true, "emit");
  }
  s.embedding_noise = get(j, "embedding_noise", s.embedding_noise, "scenario");
  if (auto it = j.find("noise"); it != j.end()) {
    const json& n = *it;
    s.noise.miss_prob = get(n, "miss_prob", 0.0, "noise");
    s.noise.jitter_px = get(n, "jitter_px", 0.0, "noise");
    s.noise.occlusion_iou = get(n, "occlusion_iou", 1.0, "noise");
    if (n.contains("employee_dropout")) {
      s.noise.employee_dropout = ranges_from(n["employee_dropout"], "noise.employee_dropout");
    }
    if (n.contains("employee_pose_dropout")) {
      s.noise.employee_pose_dropout =
          ranges_from(n["employee_pose_dropout"], "noise.employee_pose_dropout");
    }
    s.noise.seed = get<std::uint64_t>(n, "seed", 0, "noise");
  }
  const json agents = j.value("agents", json::array());
  if (!agents.is_array()) throw SpecError("agents must be a list");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const json& aj = agents[i];
    const std::string where = "agents[" + std::to_string(i) + "]";
    if (!aj.is_object()) throw SpecError(where + " must be an object");
    AgentSpec a;
    const std::string role = get<std::string>(aj, "role", "customer", where);
    if (role == "customer") {
      a.role = Role::Customer;
    } else if (role == "employee") {
      a.role = Role::Employee;
    } else {
      throw SpecError(where + ".role must be customer or employee");
    }
    a.entry_frame = get<std::int64_t>(aj, "entry_frame", 0, where);
    if (!aj.contains("start")) throw SpecError(where + ".start is required");
    a.start = point_from(aj["start"], where + ".start");
    if (aj.contains("size")) {
      const auto wh = point_from(aj["size"], where + ".size");
      a.width = wh.x();
      a.height = wh.y();
    }
    for (const json& lj : aj.value("legs", json::array())) {
      if (lj.contains("move")) {
        a.legs.push_back(Leg::move(point_from(lj["move"], where + ".legs.move").x(),
                                   point_from(lj["move"], where + ".legs.move").y(),
                                   get(lj, "speed", 1.0, where + ".legs")));
      } else if (lj.contains("wait")) {
        a.legs.push_back(Leg::wait(get<std::int64_t>(lj, "wait", 0, where + ".legs")));
      } else if (lj.contains("hide")) {
        a.legs.push_back(Leg::hide(get<std::int64_t>(lj, "hide", 0, where + ".legs")));
      } else {
        throw SpecError(where + ": each leg needs move, wait or hide");
      }
    }
    a.appearance.rgb = get(aj, "rgb", a.appearance.rgb, where);
    a.appearance.embedding_seed = get<std::uint64_t>(aj, "embedding_seed", 1, where);
    for (const json& ej : aj.value("pose_events", json::array())) {
      a.pose_events.push_back({get<std::int64_t>(ej, "start", 0, where),
                               get<std::int64_t>(ej, "end", 0, where),
                               get<int>(ej, "target", 0, where),
                               get(ej, "offset_m", 0.03, where)});
    }
    const auto cls = parse_interaction_class(get<std::string>(aj, "class", "neutral", where));
    if (!cls) throw SpecError(where + ".class is not an interaction class");
    a.gt_class = *cls;
    s.agents.push_back(std::move(a));
  }
  s.validate();
  return s;
}

}  // namespace shopsense
