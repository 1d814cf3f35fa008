// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include <Eigen/Dense>
#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include "vqebo/acquisition.hpp"
#include "vqebo/gp.hpp"
#include "vqebo/hyperopt.hpp"
#include "vqebo/run.hpp"

namespace vqebo {

namespace detail {

/// -EI as a smooth function of unconstrained angles (the kernel is periodic).
class NegativeEi final : public ceres::FirstOrderFunction {
 public:
  NegativeEi(const GPModel& model, double f_best) : model_(model), f_best_(f_best) {}

  bool Evaluate(const double* parameters, double* cost, double* gradient) const override {
    const Eigen::Map<const Eigen::VectorXd> x(parameters, model_.data().dim());
    double mu = 0.0, sd = 0.0;
    Eigen::VectorXd dmu, dsd;
    model_.mean_sd_gradient(x, mu, sd, dmu, dsd);
    const double ei = expected_improvement(mu, sd, f_best_);
    if (!std::isfinite(ei)) return false;
    *cost = -ei;
    if (gradient) {
      const Eigen::VectorXd g = -expected_improvement_gradient(mu, sd, f_best_, dmu, dsd);
      Eigen::Map<Eigen::VectorXd>(gradient, g.size()) = g;
    }
    return true;
  }

  int NumParameters() const override { return static_cast<int>(model_.data().dim()); }

 private:
  const GPModel& model_;
  double f_best_;
};

}  // namespace detail

struct EiMaximum {
  Eigen::VectorXd x;
  double value = 0.0;
  bool fallback = false;
};

/// Multi-start L-BFGS on EI; restarts are uniform on [0, 2pi)^D.
inline EiMaximum maximize_ei(const GPModel& model, double f_best, int restarts, Rng& rng) {
  const Eigen::Index dim = model.data().dim();
  ceres::GradientProblemSolver::Options options;
  options.line_search_direction_type = ceres::LBFGS;
  options.max_num_iterations = 200;
  options.function_tolerance = 1e-12;
  options.gradient_tolerance = 1e-14;
  options.parameter_tolerance = 1e-12;
  options.logging_type = ceres::SILENT;
  ceres::GradientProblem problem(new detail::NegativeEi(model, f_best));

  EiMaximum best;
  best.value = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd x = uniform_point(dim, rng);
    ceres::GradientProblemSolver::Summary summary;
    ceres::Solve(options, problem, x.data(), &summary);
    if (!x.allFinite() || !std::isfinite(summary.final_cost)) continue;
    const double value = -summary.final_cost;
    if (value > best.value) {
      best.value = value;
      best.x = wrap_angles(x);
    }
  }
  if (best.x.size() == 0) {
    best.x = uniform_point(dim, rng);
    best.value = 0.0;
    best.fallback = true;
  }
  return best;
}

/// Index of the training input with the lowest posterior mean.
inline Eigen::Index best_training_index(const GPModel& model) {
  Eigen::Index i = 0;
  model.mean(model.data().inputs()).minCoeff(&i);
  return i;
}

/// Standard GP-EI Bayesian optimization, one observation per iteration.
inline RunResult run_plain_bo(const Objective& obj, const KernelConfig& kernel_cfg, const HyperoptConfig& hyperopt,
                              const RunConfig& cfg, const InitialPoint& init, double noise_sq, Rng& rng) {
  cfg.validate();
  hyperopt.validate();
  detail::check_initial(obj, init);
  detail::TrialLog log(obj, cfg);
  log.result.record.method = "bo-ei";
  log.record_initial(init);

  KernelConfig kernel = kernel_cfg;
  Dataset data;
  data.add(init.x, init.y);
  Eigen::VectorXd incumbent = wrap_angles(init.x);
  log.checkpoint(incumbent, std::nullopt, kernel.gamma);

  long t = 0;
  try {
    while (t < cfg.t_max && cfg.fits(log.n_obs(), 1)) {
      ++t;
      if (hyperopt.enabled && hyperopt.interval.should_update(t)) kernel = optimize_gamma(kernel, noise_sq, data, hyperopt);
      const GPModel model(kernel, noise_sq, data);
      const double f_best = model.mean(data.inputs()).minCoeff();
      const EiMaximum next = maximize_ei(model, f_best, cfg.bo_restarts, rng);
      if (next.fallback) log.result.record.warnings.push_back("t=" + std::to_string(t) + ": EI search failed, random point");
      data.add(next.x, log.observe(next.x));
      cfg.inducer.apply(data);

      const GPModel updated(kernel, noise_sq, data);
      incumbent = data.inputs().col(best_training_index(updated));
      log.checkpoint(incumbent, std::nullopt, kernel.gamma);
    }
  } catch (const FactorizationError& e) {
    log.result.record.aborted = true;
    log.result.record.diagnostic = "GP factorization failed at iteration " + std::to_string(t) + ": " + e.what();
  }
  return std::move(log.result);
}

}  // namespace vqebo
