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

// Rectangular linear assignment (Hungarian method, shortest augmenting path
// with row/column potentials).
//
// Among all minimum-cost assignments the solver returns the one whose
// row-ordered (row, col) pair list is lexicographically smallest. Costs
// within a relative tolerance of the optimum count as ties. The refinement
// walks the tight subgraph of the final duals, so it never changes the cost.

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace shopsense {

template <typename Scalar>
struct Assignment {
  std::vector<std::pair<int, int>> pairs;  // (row, col), ascending row
  Scalar cost = Scalar(0);
};

namespace detail {

template <typename Scalar>
class TightGraphRefiner {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  TightGraphRefiner(const Matrix& reduced, Scalar tol, std::vector<int> row_match)
      : reduced_(reduced), tol_(tol), n_(static_cast<int>(reduced.rows())),
        row_match_(std::move(row_match)), col_match_(n_, -1), fixed_(n_, false) {
    for (int r = 0; r < n_; ++r) col_match_[row_match_[r]] = r;
  }

  bool tight(int r, int c) const { return reduced_(r, c) <= tol_; }

  // Pins row `r` to the lowest tight column in `order` that still admits a
  // perfect tight matching.
  void pin(int r, const std::vector<int>& order) {
    for (int c : order) {
      if (!tight(r, c)) continue;
      if (c == row_match_[r]) break;
      const int owner = col_match_[c];
      if (fixed_[owner]) continue;
      visited_.assign(n_, false);
      visited_[c] = true;
      const int target = row_match_[r];
      if (reroute(owner, target, r)) {
        row_match_[r] = c;
        col_match_[c] = r;
        break;
      }
    }
    fixed_[r] = true;
  }

  const std::vector<int>& row_match() const { return row_match_; }

 private:
  // Finds new tight columns for `row` and the rows it displaces so that
  // `target` ends up free. `skip` is the row being pinned.
  bool reroute(int row, int target, int skip) {
    for (int c = 0; c < n_; ++c) {
      if (visited_[c] || !tight(row, c)) continue;
      visited_[c] = true;
      const int owner = col_match_[c];
      if (c == target || (owner != skip && !fixed_[owner] && reroute(owner, target, skip))) {
        row_match_[row] = c;
        col_match_[c] = row;
        return true;
      }
    }
    return false;
  }

  const Matrix& reduced_;
  Scalar tol_;
  int n_;
  std::vector<int> row_match_;
  std::vector<int> col_match_;
  std::vector<bool> fixed_;
  std::vector<bool> visited_;
};

}  // namespace detail

// Minimum-cost assignment of min(rows, cols) rows to distinct columns.
// Costs must be finite.
template <typename Derived>
Assignment<typename Derived::Scalar> solve_assignment(const Eigen::MatrixBase<Derived>& cost) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  Assignment<Scalar> out;
  if (rows == 0 || cols == 0) return out;

  // Pad to square; dummy cells cost nothing and never bias the real optimum.
  const int n = std::max(rows, cols);
  Matrix c = Matrix::Zero(n, n);
  c.topLeftCorner(rows, cols) = cost;

  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> u(n + 1, Scalar(0)), v(n + 1, Scalar(0)), min_slack(n + 1);
  std::vector<int> owner(n + 1, 0), way(n + 1, 0);  // owner[col] = row, 1-based
  std::vector<bool> used(n + 1);

  for (int i = 1; i <= n; ++i) {
    owner[0] = i;
    int j0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const int i0 = owner[j0];
      Scalar delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const Scalar cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const int j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_match(n);
  for (int j = 1; j <= n; ++j) row_match[owner[j] - 1] = j - 1;

  Matrix reduced(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) reduced(i, j) = c(i, j) - u[i + 1] - v[j + 1];
  }
  const Scalar scale = Scalar(1) + (rows && cols ? cost.cwiseAbs().maxCoeff() : Scalar(0));
  const Scalar tol = Eigen::NumTraits<Scalar>::dummy_precision() * scale * Scalar(n);

  // Real columns first (ascending), dummies last: a matched row always sorts
  // before an unmatched one in the pair list.
  std::vector<int> order(n);
  for (int j = 0; j < n; ++j) order[j] = j;
  detail::TightGraphRefiner<Scalar> refiner(reduced, tol, std::move(row_match));
  for (int i = 0; i < rows; ++i) refiner.pin(i, order);

  for (int i = 0; i < rows; ++i) {
    const int j = refiner.row_match()[i];
    if (j < cols) {
      out.pairs.emplace_back(i, j);
      out.cost += cost(i, j);
    }
  }
  return out;
}

}  // namespace shopsense
