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

// Offline re-identification. Each track is summarized by three appearance
// cues (embedding, gradient-orientation histogram, dominant colors); track
// pairs are scored by a weighted similarity and merged greedily, best pair
// first, until no compatible pair clears the threshold.

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "shopsense/model.hpp"

namespace shopsense {

inline constexpr int kHogWidth = 64;
inline constexpr int kHogHeight = 128;
inline constexpr int kHogCell = 8;
inline constexpr int kHogBins = 9;
inline constexpr int kHogLength = 3780;  // 7 x 15 blocks, 2 x 2 cells, 9 bins
inline constexpr double kMaxRgbDistance = 441.6729559300637;  // sqrt(3) * 255

struct ColorCentroid {
  Eigen::Vector3d rgb = Eigen::Vector3d::Zero();
  double weight = 0;
};

struct AppearanceFeatures {
  std::optional<Eigen::VectorXd> embedding_mean;  // unit norm
  std::optional<Eigen::VectorXd> hog;
  std::vector<ColorCentroid> colors;  // empty when no patches; descending weight
};

struct ReidWeights {
  double cnn = 0.65;
  double hog = 0.20;
  double color = 0.15;
  double threshold = 0.75;

  void validate() const;  // throws ConfigError
  bool operator==(const ReidWeights&) const = default;
};

struct KMeansOptions {
  std::uint64_t seed = 0x5eed;
  int max_iterations = 50;
  double tolerance = 1e-3;

  bool operator==(const KMeansOptions&) const = default;
};

struct ReidParams {
  ReidWeights weights;
  double overlap_max = 0.05;       // shared frames / shorter track
  int max_feature_samples = 16;    // patches sampled per track
  int max_color_pixels = 4096;     // pooled pixels fed to k-means
  int color_k = 3;
  KMeansOptions kmeans;

  void validate() const;
  bool operator==(const ReidParams&) const = default;
};

// Nearest-neighbour resize to 64 x 128, grayscale, centered gradients,
// 8 x 8 cells with 9 unsigned orientation bins (hard assignment), 2 x 2
// block L2 normalization (eps 1e-5). Throws EmptyPatch.
Eigen::VectorXd hog_features(const RgbPatch& patch);

using RgbPixel = std::array<std::uint8_t, 3>;

// k-means++ over RGB pixels. Pixels are sorted before seeding, so the result
// does not depend on pixel order. Always returns k centroids sorted by
// descending weight; unused clusters carry weight 0. Throws TooFewPixels.
std::vector<ColorCentroid> color_signature(std::vector<RgbPixel> pixels, int k = 3,
                                           const KMeansOptions& options = {});
std::vector<ColorCentroid> color_signature(const RgbPatch& patch, int k = 3,
                                           const KMeansOptions& options = {});

// (1 + cos) / 2; two zero vectors count as identical, one zero vector as
// orthogonal.
double cosine_similarity01(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// 1 - (min-cost centroid matching distance / max RGB distance), in [0,1].
// Each matched pair costs the mean of its two weights times the RGB distance.
double color_similarity(std::span<const ColorCentroid> a, std::span<const ColorCentroid> b);

struct SimilarityBreakdown {
  std::optional<double> cnn, hog, color;
  double score = 0;
};

// Weighted mean over the cues present on both sides, weights renormalized to
// sum to one. Throws NoCommonFeatures.
SimilarityBreakdown similarity_breakdown(const AppearanceFeatures& a, const AppearanceFeatures& b,
                                         const ReidWeights& w);
double pair_similarity(const AppearanceFeatures& a, const AppearanceFeatures& b,
                       const ReidWeights& w);

AppearanceFeatures track_features(const Track& track, const ReidParams& params);

struct MergeEvent {
  int kept = 0;
  int absorbed = 0;
  double score = 0;
};

struct MergeReport {
  std::vector<MergeEvent> merges;
  std::size_t dropped_conflicts = 0;  // detections lost to same-frame conflicts
};

bool temporally_compatible(const Track& a, const Track& b, double overlap_max);

std::vector<Track> merge_pass(std::span<const Track> tracks, const ReidParams& params,
                              MergeReport* report = nullptr);

// Pairwise similarity matrix (NaN where no cue is shared), as CSV.
void write_similarity_csv(std::span<const Track> tracks, const ReidParams& params,
                          std::ostream& out);

}  // namespace shopsense
