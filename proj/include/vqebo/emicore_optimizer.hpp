// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vqebo/acquisition.hpp"
#include "vqebo/gp.hpp"
#include "vqebo/hyperopt.hpp"
#include "vqebo/nft.hpp"
#include "vqebo/run.hpp"
#include "vqebo/sinusoid.hpp"

namespace vqebo {

/// kappa = max(C0 sigma, C1 (mu[t - T] - mu[t]) / T); unchanged while fewer
/// than T + 1 incumbent scores exist.
inline double update_kappa(double kappa, const std::vector<double>& mu_history, long t_ave, double c0_scale,
                           double c1_scale, double noise_sd) {
  const auto n = static_cast<long>(mu_history.size());
  if (n <= t_ave) return kappa;
  const double reduction = (mu_history[static_cast<std::size_t>(n - 1 - t_ave)] - mu_history.back()) /
                           static_cast<double>(t_ave);
  return std::max({c0_scale * noise_sd, c1_scale * reduction, 0.0});
}

/// NFT driven by EMICoRe: each iteration observes the best pair on the
/// current axis, refits the GP and moves the incumbent to the minimum of the
/// posterior-mean sinusoid along that axis.
inline RunResult run_nft_emicore(const Objective& obj, const RunConfig& cfg, const InitialPoint& init,
                                 const KernelConfig& kernel_cfg, const HyperoptConfig& hyperopt,
                                 const EmicoreParams& params, double noise_sq, Rng& rng) {
  cfg.validate();
  hyperopt.validate();
  params.validate();
  detail::check_initial(obj, init);
  detail::TrialLog log(obj, cfg);
  log.result.record.method = "emicore";
  log.record_initial(init);

  KernelConfig kernel = kernel_cfg;
  double kappa = cfg.kappa_init;
  const double noise_sd = std::sqrt(noise_sq);
  Dataset data;
  data.add(init.x, init.y);
  NftState s{wrap_angles(init.x), init.y, 0};
  AxisChooser axes(obj.dim, cfg.axis);
  std::vector<double> mu_history;
  log.checkpoint(s.xhat, kappa, kernel.gamma);

  auto take_new = [&](Eigen::Index count) {
    const auto& all = log.result.observations;
    for (Eigen::Index i = all.size() - count; i < all.size(); ++i) data.add(all.inputs().col(i), all.outputs()[i]);
    cfg.inducer.apply(data);
  };

  try {
    while (s.t < cfg.t_nft && s.t < cfg.t_max && cfg.fits(log.n_obs(), 2)) {
      ++s.t;
      detail::nft_step(s, axes.next(rng), log);
      take_new(2);
      log.checkpoint(s.xhat, kappa, kernel.gamma);
    }

    auto model = std::make_unique<GPModel>(kernel, noise_sq, data);
    mu_history.push_back(model->mean(s.xhat));

    while (s.t < cfg.t_max && cfg.fits(log.n_obs(), 2)) {
      ++s.t;
      const Eigen::Index d = axes.next(rng);
      std::string warning;
      const EmicoreSelection sel = emicore_select(*model, s.xhat, d, kappa, params, rng, &warning);
      if (sel.fallback) log.result.record.warnings.push_back("t=" + std::to_string(s.t) + ": " + warning);
      log.observe(sel.points.col(0));
      log.observe(sel.points.col(1));
      take_new(2);

      if (hyperopt.enabled && hyperopt.interval.should_update(s.t)) kernel = optimize_gamma(kernel, noise_sq, data, hyperopt);
      model = std::make_unique<GPModel>(kernel, noise_sq, data);

      Eigen::MatrixXd probe(obj.dim, 3);
      probe << s.xhat, s.xhat, s.xhat;
      probe(d, 0) = wrap_angle(s.xhat[d] - kTwoPi / 3.0);
      probe(d, 2) = wrap_angle(s.xhat[d] + kTwoPi / 3.0);
      const Eigen::VectorXd mu = model->mean(probe);
      const SinusoidFit fit = fit_sinusoid_canonical(mu[0], mu[1], mu[2]);
      s.xhat[d] = wrap_angle(s.xhat[d] + fit.argmin_theta);

      mu_history.push_back(model->mean(s.xhat));
      s.yhat = mu_history.back();
      kappa = update_kappa(kappa, mu_history, cfg.t_ave, cfg.c0_scale, cfg.c1_scale, noise_sd);
      log.checkpoint(s.xhat, kappa, kernel.gamma);
    }
  } catch (const FactorizationError& e) {
    log.result.record.aborted = true;
    log.result.record.diagnostic = "GP factorization failed at iteration " + std::to_string(s.t) + " with N=" +
                                   std::to_string(data.size()) + ", gamma=" + format_double(kernel.gamma) + ": " +
                                   e.what();
  }
  return std::move(log.result);
}

}  // namespace vqebo
