// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "vqebo/common.hpp"

namespace vqebo {

/// f(theta) = c0 + c1 cos theta + c2 sin theta.
struct SinusoidFit {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double argmin_theta = 0.0;

  double operator()(double theta) const { return c0 + c1 * std::cos(theta) + c2 * std::sin(theta); }
  double amplitude() const { return std::hypot(c1, c2); }
  double min_value() const { return c0 - amplitude(); }
  /// df/dtheta.
  double derivative(double theta) const { return -c1 * std::sin(theta) + c2 * std::cos(theta); }
};

inline SinusoidFit finish_fit(double c0, double c1, double c2) {
  SinusoidFit f{c0, c1, c2, 0.0};
  if (c1 != 0.0 || c2 != 0.0) f.argmin_theta = wrap_angle(std::atan2(-c2, -c1));
  return f;
}

/// Exact interpolation through three (theta, value) samples.
inline SinusoidFit fit_sinusoid(const std::array<std::pair<double, double>, 3>& samples) {
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const double d = wrap_angle(samples[i].first - samples[j].first);
      if (d < 1e-9 || kTwoPi - d < 1e-9) throw std::invalid_argument("fit_sinusoid: coincident angles");
    }
  }
  Eigen::Matrix3d a;
  Eigen::Vector3d y;
  for (int i = 0; i < 3; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = std::cos(samples[i].first);
    a(i, 2) = std::sin(samples[i].first);
    y[i] = samples[i].second;
  }
  const Eigen::Vector3d c = a.fullPivLu().solve(y);
  return finish_fit(c[0], c[1], c[2]);
}

/// Closed form for samples at theta = -2pi/3, 0, +2pi/3.
inline SinusoidFit fit_sinusoid_canonical(double y_minus, double y_zero, double y_plus) {
  const double c0 = (y_minus + y_zero + y_plus) / 3.0;
  const double c1 = (2.0 * y_zero - y_minus - y_plus) / 3.0;
  const double c2 = (y_plus - y_minus) / std::numbers::sqrt3;
  return finish_fit(c0, c1, c2);
}

/// Least-squares fit over any number of samples; returns the max residual.
inline SinusoidFit fit_sinusoid_lsq(const Eigen::VectorXd& theta, const Eigen::VectorXd& values, double* max_residual = nullptr) {
  if (theta.size() != values.size() || theta.size() < 3) throw std::invalid_argument("fit_sinusoid_lsq: need >= 3 samples");
  Eigen::MatrixXd a(theta.size(), 3);
  a.col(0).setOnes();
  a.col(1) = theta.array().cos();
  a.col(2) = theta.array().sin();
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(values);
  if (max_residual) *max_residual = (a * c - values).cwiseAbs().maxCoeff();
  return finish_fit(c[0], c[1], c[2]);
}

}  // namespace vqebo
