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


#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "shopsense/hungarian.hpp"
#include "test_util.hpp"

namespace shopsense {
namespace {

using testing::Gen;

// Exhaustive oracle: minimum over every injective map of the smaller side.
double brute_force(const Eigen::MatrixXd& c) {
  const bool tall = c.rows() > c.cols();
  const Eigen::MatrixXd m = tall ? Eigen::MatrixXd(c.transpose()) : c;
  std::vector<int> cols(static_cast<std::size_t>(m.cols()));
  std::iota(cols.begin(), cols.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0;
    for (int r = 0; r < m.rows(); ++r) s += m(r, cols[r]);
    best = std::min(best, s);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

void expect_valid(const Assignment<double>& a, const Eigen::MatrixXd& c) {
  ASSERT_EQ(a.pairs.size(), static_cast<std::size_t>(std::min(c.rows(), c.cols())));
  std::vector<bool> rows(c.rows()), cols(c.cols());
  double total = 0;
  for (auto [r, k] : a.pairs) {
    EXPECT_FALSE(rows[r]);
    EXPECT_FALSE(cols[k]);
    rows[r] = cols[k] = true;
    total += c(r, k);
  }
  EXPECT_TRUE(std::is_sorted(a.pairs.begin(), a.pairs.end()));
  EXPECT_NEAR(total, a.cost, 1e-9);
}

TEST(Hungarian, Empty) {
  EXPECT_TRUE(solve_assignment(Eigen::MatrixXd(0, 3)).pairs.empty());
  EXPECT_TRUE(solve_assignment(Eigen::MatrixXd(2, 0)).pairs.empty());
}

TEST(Hungarian, KnownThreeByThree) {
  Eigen::Matrix3d c;
  c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const auto a = solve_assignment(c);
  EXPECT_DOUBLE_EQ(a.cost, 5.0);
  const std::vector<std::pair<int, int>> want = {{0, 1}, {1, 0}, {2, 2}};
  EXPECT_EQ(a.pairs, want);
}

TEST(Hungarian, PropertyMatchesBruteForce) {
  Gen g(99);
  for (int i = 0; i < 1000; ++i) {
    const int r = g.integer(1, 6), k = g.integer(1, 6);
    Eigen::MatrixXd c(r, k);
    for (auto& x : c.reshaped()) x = g.coin(0.3) ? g.integer(0, 3) : g.uniform(0, 10);
    const auto a = solve_assignment(c);
    expect_valid(a, c);
    EXPECT_NEAR(a.cost, brute_force(c), 1e-9) << c;
  }
}

TEST(Hungarian, TiesPickLexicographicallySmallest) {
  // All-equal cost: identity is the lex-smallest optimum.
  const auto a = solve_assignment(Eigen::MatrixXd::Constant(4, 4, 1.0));
  for (int i = 0; i < 4; ++i) EXPECT_EQ(a.pairs[i], std::make_pair(i, i));
  // Same answer regardless of column order presented by equal rows.
  Eigen::MatrixXd c(2, 3);
  c << 1, 0, 0, 1, 0, 0;
  const auto b = solve_assignment(c);
  const std::vector<std::pair<int, int>> want = {{0, 1}, {1, 2}};
  EXPECT_EQ(b.pairs, want);
}

TEST(Hungarian, RectangularBothWays) {
  Eigen::MatrixXd wide(1, 3);
  wide << 5, 2, 7;
  EXPECT_EQ(solve_assignment(wide).pairs, (std::vector<std::pair<int, int>>{{0, 1}}));
  const auto tall = solve_assignment(Eigen::MatrixXd(wide.transpose()));
  EXPECT_EQ(tall.pairs, (std::vector<std::pair<int, int>>{{1, 0}}));
}

TEST(Hungarian, FloatScalar) {
  Eigen::Matrix2f c;
  c << 1.f, 2.f, 2.f, 1.f;
  const auto a = solve_assignment(c);
  EXPECT_FLOAT_EQ(a.cost, 2.f);
}

}  // namespace
}  // namespace shopsense
