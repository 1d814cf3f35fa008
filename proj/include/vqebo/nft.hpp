// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>

#include <Eigen/Dense>

#include "vqebo/common.hpp"
#include "vqebo/run.hpp"
#include "vqebo/sinusoid.hpp"

namespace vqebo {

/// Chooses the axis for each iteration: a cycling cursor or uniform draws.
class AxisChooser {
 public:
  AxisChooser(Eigen::Index dim, AxisMode mode) : dim_(dim), mode_(mode) {}

  Eigen::Index next(Rng& rng) {
    if (mode_ == AxisMode::random) return std::uniform_int_distribution<Eigen::Index>(0, dim_ - 1)(rng);
    const Eigen::Index d = cursor_;
    cursor_ = (cursor_ + 1) % dim_;
    return d;
  }

  Eigen::Index cursor() const { return cursor_; }

 private:
  Eigen::Index dim_;
  AxisMode mode_;
  Eigen::Index cursor_ = 0;
};

struct NftState {
  Eigen::VectorXd xhat;
  double yhat = 0.0;
  long t = 0;
};

namespace detail {

/// One SMO move along `axis`: observe x +- 2pi/3 e_d, fit through the
/// incumbent score, jump to the fitted minimum.
inline void nft_step(NftState& s, Eigen::Index axis, TrialLog& log) {
  Eigen::VectorXd minus = s.xhat, plus = s.xhat;
  minus[axis] = wrap_angle(s.xhat[axis] - kTwoPi / 3.0);
  plus[axis] = wrap_angle(s.xhat[axis] + kTwoPi / 3.0);
  const double y_minus = log.observe(minus);
  const double y_plus = log.observe(plus);
  const SinusoidFit fit = fit_sinusoid_canonical(y_minus, s.yhat, y_plus);
  s.xhat[axis] = wrap_angle(s.xhat[axis] + fit.argmin_theta);
  s.yhat = fit.min_value();
}

}  // namespace detail

/// Nakanishi-Fujii-Todo sequential minimal optimization.
inline RunResult run_nft(const Objective& obj, const RunConfig& cfg, const InitialPoint& init, Rng& rng) {
  cfg.validate();
  detail::check_initial(obj, init);
  detail::TrialLog log(obj, cfg);
  log.result.record.method = cfg.axis == AxisMode::sequential ? "nft-seq" : "nft-rand";
  log.record_initial(init);

  NftState s{wrap_angles(init.x), init.y, 0};
  AxisChooser axes(obj.dim, cfg.axis);
  log.checkpoint(s.xhat, std::nullopt, std::nullopt);
  while (s.t < cfg.t_max && cfg.fits(log.n_obs(), 2)) {
    ++s.t;
    detail::nft_step(s, axes.next(rng), log);
    if (cfg.t_reset > 0 && s.t % cfg.t_reset == 0 && cfg.fits(log.n_obs(), 1)) s.yhat = log.observe(s.xhat);
    log.checkpoint(s.xhat, std::nullopt, std::nullopt);
  }
  return std::move(log.result);
}

}  // namespace vqebo
