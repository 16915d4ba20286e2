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

// Constant-velocity box filter.
//
// State  x = [cx, cy, s, r, v_cx, v_cy, v_s]   (s = w*h, r = w/h)
// Measure z = [cx, cy, s, r]
//
// Aspect ratio has no velocity term. Updates use the Joseph form and the
// covariance is re-symmetrized after every step so it stays PSD over long
// coasting runs.

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>

#include "shopsense/model.hpp"

namespace shopsense {

// Standard deviations. Process terms are per frame.
template <typename Scalar>
struct KalmanNoise {
  Scalar position = 1;          // px
  Scalar velocity = 0.5;        // px / frame
  Scalar area = 10;             // px^2
  Scalar area_velocity = 1;     // px^2 / frame
  Scalar aspect = 0.01;
  Scalar measurement = 1;       // px
  Scalar measurement_area = 10; // px^2
  Scalar measurement_aspect = 0.01;
  Scalar initial_velocity = 100;       // px / frame
  Scalar initial_area_velocity = 1000; // px^2 / frame

  bool operator==(const KalmanNoise&) const = default;
};

template <typename Scalar>
struct KalmanState {
  using Vector = Eigen::Matrix<Scalar, 7, 1>;
  using Matrix = Eigen::Matrix<Scalar, 7, 7>;

  Vector mean = Vector::Zero();
  Matrix covariance = Matrix::Identity();
  bool degenerate = false;  // area was clamped during prediction
};

template <typename Scalar>
struct KalmanUpdate {
  KalmanState<Scalar> state;
  Eigen::Matrix<Scalar, 4, 1> innovation;
  Eigen::Matrix<Scalar, 4, 4> innovation_covariance;

  // Normalized innovation squared (squared Mahalanobis distance).
  Scalar nis() const {
    return innovation.dot(innovation_covariance.ldlt().solve(innovation));
  }
};

namespace kalman {

inline constexpr double kMinArea = 1.0;
inline constexpr double kMinAspect = 1e-3;

template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> measure(const BBox& box) {
  return {Scalar(box.cx()), Scalar(box.cy()), Scalar(box.area()), Scalar(box.w() / box.h())};
}

template <typename Scalar>
BBox to_bbox(const KalmanState<Scalar>& state) {
  const double s = std::max<double>(state.mean[2], kMinArea);
  const double r = std::max<double>(state.mean[3], kMinAspect);
  const double w = std::sqrt(s * r);
  return BBox(state.mean[0], state.mean[1], w, s / w);
}

template <typename Scalar>
Eigen::Matrix<Scalar, 7, 7> transition() {
  Eigen::Matrix<Scalar, 7, 7> f = Eigen::Matrix<Scalar, 7, 7>::Identity();
  f(0, 4) = f(1, 5) = f(2, 6) = Scalar(1);
  return f;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 4, 7> observation() {
  Eigen::Matrix<Scalar, 4, 7> h = Eigen::Matrix<Scalar, 4, 7>::Zero();
  h.template leftCols<4>().setIdentity();
  return h;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 7, 7> process_noise(const KalmanNoise<Scalar>& n) {
  Eigen::Matrix<Scalar, 7, 1> sd;
  sd << n.position, n.position, n.area, n.aspect, n.velocity, n.velocity, n.area_velocity;
  return sd.cwiseAbs2().asDiagonal();
}

template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> measurement_noise(const KalmanNoise<Scalar>& n) {
  Eigen::Matrix<Scalar, 4, 1> sd;
  sd << n.measurement, n.measurement, n.measurement_area, n.measurement_aspect;
  return sd.cwiseAbs2().asDiagonal();
}

}  // namespace kalman

template <typename Scalar>
KalmanState<Scalar> initiate(const BBox& box, const KalmanNoise<Scalar>& noise) {
  KalmanState<Scalar> st;
  st.mean.template head<4>() = kalman::measure<Scalar>(box);
  Eigen::Matrix<Scalar, 7, 1> sd;
  sd << noise.measurement, noise.measurement, noise.measurement_area, noise.measurement_aspect,
      noise.initial_velocity, noise.initial_velocity, noise.initial_area_velocity;
  st.covariance = sd.cwiseAbs2().asDiagonal();
  return st;
}

// One frame ahead under constant velocity.
template <typename Scalar>
KalmanState<Scalar> predict(const KalmanState<Scalar>& state, const KalmanNoise<Scalar>& noise) {
  static const auto f = kalman::transition<Scalar>();
  KalmanState<Scalar> out;
  out.mean = f * state.mean;
  out.covariance = f * state.covariance * f.transpose() + kalman::process_noise(noise);
  out.covariance = (out.covariance + out.covariance.transpose()) / Scalar(2);
  out.degenerate = state.degenerate;
  if (!(out.mean[2] > Scalar(kalman::kMinArea))) {
    out.mean[2] = Scalar(kalman::kMinArea);
    out.mean[6] = Scalar(0);
    out.degenerate = true;
  }
  return out;
}

template <typename Scalar>
KalmanUpdate<Scalar> innovate(const KalmanState<Scalar>& state, const BBox& obs,
                              const KalmanNoise<Scalar>& noise) {
  static const auto h = kalman::observation<Scalar>();
  KalmanUpdate<Scalar> u;
  u.state = state;
  u.innovation = kalman::measure<Scalar>(obs) - h * state.mean;
  u.innovation_covariance =
      h * state.covariance * h.transpose() + kalman::measurement_noise(noise);
  return u;
}

// Kalman correction with `obs`. `measurement_scale` multiplies R (used to
// probe the noiseless limit).
template <typename Scalar>
KalmanUpdate<Scalar> update(const KalmanState<Scalar>& state, const BBox& obs,
                            const KalmanNoise<Scalar>& noise, Scalar measurement_scale = 1) {
  using Mat7 = Eigen::Matrix<Scalar, 7, 7>;
  static const auto h = kalman::observation<Scalar>();
  const Eigen::Matrix<Scalar, 4, 4> r = kalman::measurement_noise(noise) * measurement_scale;

  KalmanUpdate<Scalar> u;
  u.innovation = kalman::measure<Scalar>(obs) - h * state.mean;
  u.innovation_covariance = h * state.covariance * h.transpose() + r;

  // K = P H^T S^-1, via S K^T = H P.
  const Eigen::Matrix<Scalar, 7, 4> gain =
      u.innovation_covariance.ldlt().solve(h * state.covariance).transpose();
  const Mat7 i_kh = Mat7::Identity() - gain * h;

  u.state.mean = state.mean + gain * u.innovation;
  u.state.covariance = i_kh * state.covariance * i_kh.transpose() + gain * r * gain.transpose();
  u.state.covariance = (u.state.covariance + u.state.covariance.transpose()) / Scalar(2);
  u.state.mean[2] = std::max(u.state.mean[2], Scalar(kalman::kMinArea));
  u.state.mean[3] = std::max(u.state.mean[3], Scalar(kalman::kMinAspect));
  u.state.degenerate = state.degenerate;
  return u;
}

}  // namespace shopsense
