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

#include "shopsense/reid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "shopsense/hungarian.hpp"

namespace shopsense {

void ReidWeights::validate() const {
  if (cnn < 0 || hog < 0 || color < 0) throw ConfigError("reid weights must be nonnegative");
  if (std::abs(cnn + hog + color - 1.0) > 1e-9) throw ConfigError("reid weights must sum to 1");
  if (!(threshold >= 0 && threshold <= 1)) throw ConfigError("reid threshold must be in [0,1]");
}

void ReidParams::validate() const {
  weights.validate();
  if (!(overlap_max >= 0 && overlap_max <= 1)) throw ConfigError("reid.overlap_max must be in [0,1]");
  if (max_feature_samples < 1) throw ConfigError("reid.max_feature_samples must be >= 1");
  if (max_color_pixels < color_k) throw ConfigError("reid.max_color_pixels must be >= color_k");
  if (color_k < 1) throw ConfigError("reid.color_k must be >= 1");
  if (kmeans.max_iterations < 1 || !(kmeans.tolerance > 0)) {
    throw ConfigError("reid k-means options out of range");
  }
}

Eigen::VectorXd hog_features(const RgbPatch& patch) {
  if (patch.empty() || patch.rgb.size() != patch.pixel_count() * 3) {
    throw EmptyPatch("hog_features needs a nonempty patch");
  }
  // Nearest-neighbour resample to the canonical window, then luma.
  Eigen::MatrixXd gray(kHogHeight, kHogWidth);
  for (int y = 0; y < kHogHeight; ++y) {
    const int sy = std::min(patch.height - 1, (2 * y + 1) * patch.height / (2 * kHogHeight));
    for (int x = 0; x < kHogWidth; ++x) {
      const int sx = std::min(patch.width - 1, (2 * x + 1) * patch.width / (2 * kHogWidth));
      const std::uint8_t* p = patch.pixel(sx, sy);
      gray(y, x) = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
  }

  constexpr int cells_x = kHogWidth / kHogCell;
  constexpr int cells_y = kHogHeight / kHogCell;
  Eigen::MatrixXd hist = Eigen::MatrixXd::Zero(cells_y * cells_x, kHogBins);
  constexpr double bin_width = 180.0 / kHogBins;
  for (int y = 0; y < kHogHeight; ++y) {
    const int ym = std::max(0, y - 1), yp = std::min(kHogHeight - 1, y + 1);
    for (int x = 0; x < kHogWidth; ++x) {
      const int xm = std::max(0, x - 1), xp = std::min(kHogWidth - 1, x + 1);
      const double gx = gray(y, xp) - gray(y, xm);
      const double gy = gray(yp, x) - gray(ym, x);
      const double mag = std::hypot(gx, gy);
      if (mag == 0) continue;
      double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      if (angle < 0) angle += 180.0;
      if (angle >= 180.0) angle -= 180.0;
      const int bin = std::min(kHogBins - 1, static_cast<int>(angle / bin_width));
      hist((y / kHogCell) * cells_x + x / kHogCell, bin) += mag;
    }
  }

  constexpr double eps = 1e-5;
  Eigen::VectorXd out(kHogLength);
  Eigen::Index k = 0;
  for (int by = 0; by + 1 < cells_y; ++by) {
    for (int bx = 0; bx + 1 < cells_x; ++bx) {
      Eigen::Matrix<double, 4 * kHogBins, 1> block;
      int c = 0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          block.segment<kHogBins>(c * kHogBins) = hist.row((by + dy) * cells_x + bx + dx).transpose();
          ++c;
        }
      }
      out.segment<4 * kHogBins>(k) = block / std::sqrt(block.squaredNorm() + eps * eps);
      k += 4 * kHogBins;
    }
  }
  return out;
}

std::vector<ColorCentroid> color_signature(std::vector<RgbPixel> pixels, int k,
                                           const KMeansOptions& options) {
  if (k < 1 || pixels.size() < static_cast<std::size_t>(k)) {
    throw TooFewPixels("color_signature needs at least k pixels");
  }
  std::sort(pixels.begin(), pixels.end());
  const std::size_t n = pixels.size();
  std::vector<Eigen::Vector3d> points(n);
  for (std::size_t i = 0; i < n; ++i) {
    points[i] = {double(pixels[i][0]), double(pixels[i][1]), double(pixels[i][2])};
  }

  std::mt19937_64 rng(options.seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  // k-means++ seeding; stops early once every pixel coincides with a center.
  std::vector<Eigen::Vector3d> centers;
  centers.push_back(points[std::min(n - 1, static_cast<std::size_t>(uniform() * n))]);
  std::vector<double> d2(n);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, (points[i] - c).squaredNorm());
      d2[i] = best;
      total += best;
    }
    if (total <= 0) break;
    const double r = uniform() * total;
    double acc = 0;
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc > r && d2[i] > 0) {
        pick = i;
        break;
      }
    }
    centers.push_back(points[pick]);
  }

  const std::size_t kk = centers.size();
  std::vector<std::size_t> label(n, 0), count(kk, 0);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < kk; ++c) {
        const double d = (points[i] - centers[c]).squaredNorm();
        if (d < best) {
          best = d;
          label[i] = c;
        }
      }
    }
    std::vector<Eigen::Vector3d> sums(kk, Eigen::Vector3d::Zero());
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[label[i]] += points[i];
      ++count[label[i]];
    }
    double shift = 0;
    for (std::size_t c = 0; c < kk; ++c) {
      if (count[c] == 0) continue;
      const Eigen::Vector3d next = sums[c] / static_cast<double>(count[c]);
      shift = std::max(shift, (next - centers[c]).norm());
      centers[c] = next;
    }
    if (shift < options.tolerance) break;
  }

  std::vector<ColorCentroid> out;
  for (std::size_t c = 0; c < kk; ++c) {
    out.push_back({centers[c], static_cast<double>(count[c]) / static_cast<double>(n)});
  }
  while (static_cast<int>(out.size()) < k) out.push_back({centers.front(), 0.0});
  std::stable_sort(out.begin(), out.end(), [](const ColorCentroid& a, const ColorCentroid& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return std::lexicographical_compare(a.rgb.data(), a.rgb.data() + 3, b.rgb.data(),
                                        b.rgb.data() + 3);
  });
  return out;
}

std::vector<ColorCentroid> color_signature(const RgbPatch& patch, int k,
                                           const KMeansOptions& options) {
  std::vector<RgbPixel> pixels(patch.pixel_count());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = {patch.rgb[3 * i], patch.rgb[3 * i + 1], patch.rgb[3 * i + 2]};
  }
  return color_signature(std::move(pixels), k, options);
}

double cosine_similarity01(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0 && nb == 0) return 1.0;
  if (na == 0 || nb == 0) return 0.5;
  const double cos = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return (1.0 + cos) / 2.0;
}

double color_similarity(std::span<const ColorCentroid> a, std::span<const ColorCentroid> b) {
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      cost(i, j) = 0.5 * (a[i].weight + b[j].weight) * (a[i].rgb - b[j].rgb).norm();
    }
  }
  const double distance = solve_assignment(cost).cost;
  return std::clamp(1.0 - distance / kMaxRgbDistance, 0.0, 1.0);
}

SimilarityBreakdown similarity_breakdown(const AppearanceFeatures& a, const AppearanceFeatures& b,
                                         const ReidWeights& w) {
  SimilarityBreakdown out;
  double weight = 0, acc = 0;
  if (a.embedding_mean && b.embedding_mean &&
      a.embedding_mean->size() == b.embedding_mean->size()) {
    out.cnn = cosine_similarity01(*a.embedding_mean, *b.embedding_mean);
    weight += w.cnn;
    acc += w.cnn * *out.cnn;
  }
  if (a.hog && b.hog && a.hog->size() == b.hog->size()) {
    out.hog = cosine_similarity01(*a.hog, *b.hog);
    weight += w.hog;
    acc += w.hog * *out.hog;
  }
  if (!a.colors.empty() && !b.colors.empty()) {
    out.color = color_similarity(a.colors, b.colors);
    weight += w.color;
    acc += w.color * *out.color;
  }
  if (!out.cnn && !out.hog && !out.color) throw NoCommonFeatures("no appearance cue on both sides");
  // All present cues weighted zero: fall back to the unweighted mean.
  if (weight <= 0) {
    int n = 0;
    acc = 0;
    for (const auto& s : {out.cnn, out.hog, out.color}) {
      if (s) {
        acc += *s;
        ++n;
      }
    }
    out.score = acc / n;
    return out;
  }
  out.score = std::clamp(acc / weight, 0.0, 1.0);
  return out;
}

double pair_similarity(const AppearanceFeatures& a, const AppearanceFeatures& b,
                       const ReidWeights& w) {
  return similarity_breakdown(a, b, w).score;
}

AppearanceFeatures track_features(const Track& track, const ReidParams& params) {
  AppearanceFeatures f;
  Eigen::VectorXd sum;
  std::vector<const RgbPatch*> patches;
  for (const Detection& d : track.detections) {
    if (d.embedding) {
      if (sum.size() == 0) sum = Eigen::VectorXd::Zero(d.embedding->size());
      if (sum.size() == d.embedding->size()) sum += *d.embedding;
    }
    if (d.patch && !d.patch->empty()) patches.push_back(&*d.patch);
  }
  if (sum.size() > 0 && sum.norm() > 0) f.embedding_mean = sum / sum.norm();

  if (patches.empty()) return f;
  const std::size_t m = std::min<std::size_t>(patches.size(), params.max_feature_samples);
  Eigen::VectorXd hog = Eigen::VectorXd::Zero(kHogLength);
  std::vector<RgbPixel> pooled;
  for (std::size_t i = 0; i < m; ++i) {
    const RgbPatch& p = *patches[(2 * i + 1) * patches.size() / (2 * m)];
    hog += hog_features(p);
    for (std::size_t q = 0; q < p.pixel_count(); ++q) {
      pooled.push_back({p.rgb[3 * q], p.rgb[3 * q + 1], p.rgb[3 * q + 2]});
    }
  }
  f.hog = hog / static_cast<double>(m);

  std::sort(pooled.begin(), pooled.end());
  const std::size_t stride =
      (pooled.size() + params.max_color_pixels - 1) / static_cast<std::size_t>(params.max_color_pixels);
  if (stride > 1) {
    std::vector<RgbPixel> thinned;
    for (std::size_t i = 0; i < pooled.size(); i += stride) thinned.push_back(pooled[i]);
    pooled = std::move(thinned);
  }
  if (pooled.size() >= static_cast<std::size_t>(params.color_k)) {
    f.colors = color_signature(std::move(pooled), params.color_k, params.kmeans);
  }
  return f;
}

bool temporally_compatible(const Track& a, const Track& b, double overlap_max) {
  const std::size_t shorter = std::min(a.detections.size(), b.detections.size());
  return static_cast<double>(shared_frames(a, b)) <= overlap_max * static_cast<double>(shorter);
}

namespace {

double score_or_nan(const AppearanceFeatures& a, const AppearanceFeatures& b, const ReidWeights& w) {
  try {
    return pair_similarity(a, b, w);
  } catch (const NoCommonFeatures&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

std::vector<Track> merge_pass(std::span<const Track> input, const ReidParams& params,
                              MergeReport* report) {
  params.validate();
  std::vector<Track> tracks(input.begin(), input.end());
  std::sort(tracks.begin(), tracks.end(),
            [](const Track& a, const Track& b) { return a.track_id < b.track_id; });
  std::vector<AppearanceFeatures> features;
  features.reserve(tracks.size());
  for (const Track& t : tracks) features.push_back(track_features(t, params));

  const auto n0 = static_cast<Eigen::Index>(tracks.size());
  Eigen::MatrixXd score = Eigen::MatrixXd::Constant(n0, n0, std::numeric_limits<double>::quiet_NaN());
  for (Eigen::Index i = 0; i < n0; ++i) {
    for (Eigen::Index j = i + 1; j < n0; ++j) {
      score(i, j) = score(j, i) = score_or_nan(features[i], features[j], params.weights);
    }
  }
  std::vector<bool> alive(tracks.size(), true);

  while (true) {
    Eigen::Index bi = -1, bj = -1;
    double best = params.weights.threshold;
    for (Eigen::Index i = 0; i < n0; ++i) {
      if (!alive[i]) continue;
      for (Eigen::Index j = i + 1; j < n0; ++j) {
        if (!alive[j]) continue;
        const double s = score(i, j);
        // Strict '>' keeps the lowest (i, j) among equal scores.
        if (!(s > best)) continue;
        if (!temporally_compatible(tracks[i], tracks[j], params.overlap_max)) continue;
        best = s;
        bi = i;
        bj = j;
      }
    }
    if (bi < 0) break;

    // The track seen first keeps its id.
    Eigen::Index keep = bi, drop = bj;
    if (tracks[bj].first_frame() < tracks[bi].first_frame()) std::swap(keep, drop);
    const std::size_t dropped = absorb(tracks[keep], tracks[drop]);
    alive[drop] = false;
    if (report) {
      report->merges.push_back({tracks[keep].track_id, tracks[drop].track_id, best});
      report->dropped_conflicts += dropped;
    }
    features[keep] = track_features(tracks[keep], params);
    for (Eigen::Index j = 0; j < n0; ++j) {
      if (j == keep || !alive[j]) continue;
      score(keep, j) = score(j, keep) = score_or_nan(features[keep], features[j], params.weights);
    }
  }

  std::vector<Track> out;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (alive[i]) out.push_back(std::move(tracks[i]));
  }
  std::sort(out.begin(), out.end(),
            [](const Track& a, const Track& b) { return a.track_id < b.track_id; });
  return out;
}

void write_similarity_csv(std::span<const Track> tracks, const ReidParams& params,
                          std::ostream& out) {
  std::vector<AppearanceFeatures> features;
  for (const Track& t : tracks) features.push_back(track_features(t, params));
  out << "track_id";
  for (const Track& t : tracks) out << ',' << t.track_id;
  out << '\n';
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    out << tracks[i].track_id;
    for (std::size_t j = 0; j < tracks.size(); ++j) {
      out << ',';
      const double s = i == j ? 1.0 : score_or_nan(features[i], features[j], params.weights);
      if (std::isnan(s)) {
        out << "nan";
      } else {
        out << s;
      }
    }
    out << '\n';
  }
}

}  // namespace shopsense
