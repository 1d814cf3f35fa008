// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vqebo/common.hpp"
#include "vqebo/gp.hpp"
#include "vqebo/sampling.hpp"

namespace vqebo {

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Analytic expected improvement for minimization.
inline double expected_improvement(double mu, double sd, double f_best) {
  if (sd < 0.0) throw std::invalid_argument("expected_improvement: negative standard deviation");
  const double gap = f_best - mu;
  if (sd == 0.0) return std::max(0.0, gap);
  const double z = gap / sd;
  return std::max(0.0, gap * normal_cdf(z) + sd * normal_pdf(z));
}

/// d EI / d x given the gradients of the posterior mean and standard deviation.
inline Eigen::VectorXd expected_improvement_gradient(double mu, double sd, double f_best, const Eigen::VectorXd& dmu,
                                                     const Eigen::VectorXd& dsd) {
  if (sd <= 0.0) return (f_best > mu) ? Eigen::VectorXd(-dmu) : Eigen::VectorXd::Zero(dmu.size());
  const double z = (f_best - mu) / sd;
  return -normal_cdf(z) * dmu + normal_pdf(z) * dsd;
}

/// Monte Carlo <max(0, min_prev f - min_new f)> over joint draws (columns of
/// `draws`). Empty `next` scores 0.
inline double mean_improvement(const Eigen::MatrixXd& draws, const std::vector<Eigen::Index>& prev,
                               const std::vector<Eigen::Index>& next) {
  if (prev.empty()) throw std::invalid_argument("mean_improvement: empty reference set");
  if (next.empty() || draws.cols() == 0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index s = 0; s < draws.cols(); ++s) {
    double a = std::numeric_limits<double>::infinity(), b = a;
    for (auto i : prev) a = std::min(a, draws(i, s));
    for (auto i : next) b = std::min(b, draws(i, s));
    acc += std::max(0.0, a - b);
  }
  return acc / static_cast<double>(draws.cols());
}

/// Stacks columns of a and b.
inline Eigen::MatrixXd hstack(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() > 0 && b.cols() > 0 && a.rows() != b.rows()) throw std::invalid_argument("hstack: row mismatch");
  Eigen::MatrixXd out(a.cols() > 0 ? a.rows() : b.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

inline std::vector<Eigen::Index> index_range(Eigen::Index begin, Eigen::Index end) {
  std::vector<Eigen::Index> v;
  for (Eigen::Index i = begin; i < end; ++i) v.push_back(i);
  return v;
}

/// Noisy expected improvement of observing `new_points` (D x M): Monte Carlo
/// over the joint posterior at training inputs followed by new points. One
/// 64-bit seed is taken from `rng` and drives all draws.
inline double noisy_ei(const GPModel& model, const Eigen::MatrixXd& new_points, Eigen::Index n_mc, Sampler sampler,
                       Rng& rng) {
  if (model.size() < 1) throw std::invalid_argument("noisy_ei: model has no training data");
  if (n_mc < 1) throw std::invalid_argument("noisy_ei: n_mc must be >= 1");
  const Eigen::Index n = model.size();
  const PosteriorGaussian post = model.posterior(hstack(model.data().inputs(), new_points));
  Rng local(rng());
  const Eigen::MatrixXd draws = transform_normals(post, standard_normals(post.size(), n_mc, sampler, local));
  return mean_improvement(draws, index_range(0, n), index_range(n, post.size()));
}

/// Points x + alpha_j e_d with alpha_j = 2 pi j / (count + 1), j = 1..count.
inline Eigen::MatrixXd axis_grid(const Eigen::VectorXd& x, Eigen::Index axis, Eigen::Index count) {
  if (axis < 0 || axis >= x.size()) throw std::invalid_argument("axis_grid: axis out of range");
  Eigen::MatrixXd g(x.size(), count);
  for (Eigen::Index j = 0; j < count; ++j) {
    g.col(j) = x;
    g(axis, j) = wrap_angle(x[axis] + kTwoPi * static_cast<double>(j + 1) / static_cast<double>(count + 1));
  }
  return g;
}

struct CoReSet {
  Eigen::MatrixXd grid;         // D x J_OG
  Eigen::VectorXd variances;    // posterior variance per grid point
  std::vector<bool> members;    // variance <= kappa^2
  double kappa = 0.0;

  std::size_t count() const { return static_cast<std::size_t>(std::count(members.begin(), members.end(), true)); }
};

/// Confident region on the axis grid through the incumbent. Posterior
/// variance does not depend on observed values, so only inputs are needed.
inline CoReSet core_set(const Eigen::MatrixXd& inputs, Eigen::Index axis, const Eigen::VectorXd& incumbent,
                        double kappa, Eigen::Index j_og, const KernelConfig& kernel, double noise_sq) {
  if (j_og < 1) throw std::invalid_argument("core_set: j_og must be >= 1");
  if (kappa < 0.0) throw std::invalid_argument("core_set: kappa must be >= 0");
  const GPModel model(kernel, noise_sq,
                      inputs.cols() > 0 ? Dataset(inputs, Eigen::VectorXd::Zero(inputs.cols())) : Dataset(incumbent.size()));
  CoReSet c;
  c.kappa = kappa;
  c.grid = axis_grid(incumbent, axis, j_og);
  c.variances = model.variance(c.grid);
  const double k2 = kappa * kappa;
  for (Eigen::Index j = 0; j < j_og; ++j) c.members.push_back(c.variances[j] <= k2);
  return c;
}

enum class CoreMembership {
  threshold,               // variance <= kappa^2 on the evaluation grid
  training_and_candidates  // reduces the score to noisy EI
};

struct EmicoreParams {
  Eigen::Index m = 2;
  Eigen::Index j_sg = 20;
  Eigen::Index j_og = 100;
  Eigen::Index n_mc = 100;
  Eigen::Index max_core_points = 512;
  Sampler sampler = Sampler::low_discrepancy;
  CoreMembership membership = CoreMembership::threshold;

  void validate() const {
    if (m != 2) throw std::invalid_argument("EMICoRe proposes exactly 2 points per step");
    if (j_sg < 2) throw std::invalid_argument("j_sg must be >= 2");
    if (j_og < 2) throw std::invalid_argument("j_og must be >= 2");
    if (n_mc < 1) throw std::invalid_argument("n_mc must be >= 1");
    if (max_core_points < 1) throw std::invalid_argument("max_core_points must be >= 1");
  }
};

struct EmicoreSelection {
  Eigen::MatrixXd points;  // D x 2
  std::vector<double> scores;
  std::vector<std::size_t> core_sizes;
  Eigen::Index best = -1;
  bool fallback = false;
};

/// Evenly strided subset of at most `cap` entries.
inline std::vector<Eigen::Index> stride_subsample(const std::vector<Eigen::Index>& v, Eigen::Index cap) {
  if (static_cast<Eigen::Index>(v.size()) <= cap) return v;
  std::vector<Eigen::Index> out;
  const double step = static_cast<double>(v.size()) / static_cast<double>(cap);
  for (Eigen::Index k = 0; k < cap; ++k) out.push_back(v[static_cast<std::size_t>(static_cast<double>(k) * step)]);
  return out;
}

/// Picks the pair of axis points maximizing the expected improvement of the
/// CoRe minimum over the previous optimum. Candidates are ordered pairs of
/// distinct search-grid offsets, enumerated row-major in (first, second).
/// One seed is drawn from `rng` and shared by every candidate.
inline EmicoreSelection emicore_select(const GPModel& model, const Eigen::VectorXd& incumbent, Eigen::Index axis,
                                       double kappa, const EmicoreParams& params, Rng& rng,
                                       std::string* warning = nullptr) {
  params.validate();
  if (model.size() < 1) throw std::invalid_argument("emicore_select: model has no training data");
  if (kappa < 0.0) throw std::invalid_argument("emicore_select: kappa must be >= 0");
  const Eigen::Index dim = incumbent.size();
  const Eigen::VectorXd xhat = wrap_angles(incumbent);
  const Eigen::MatrixXd search = axis_grid(xhat, axis, params.j_sg);
  const std::uint64_t seed = rng();

  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < params.j_sg; ++i)
    for (Eigen::Index j = 0; j < params.j_sg; ++j)
      if (i != j) pairs.emplace_back(i, j);

  EmicoreSelection sel;
  sel.scores.assign(pairs.size(), 0.0);
  sel.core_sizes.assign(pairs.size(), 0);
  const double inv_m = 1.0 / static_cast<double>(params.m);

  if (params.membership == CoreMembership::training_and_candidates) {
    const Eigen::Index n = model.size();
    for (std::size_t c = 0; c < pairs.size(); ++c) {
      Eigen::MatrixXd cand(dim, 2);
      cand << search.col(pairs[c].first), search.col(pairs[c].second);
      const PosteriorGaussian post = model.posterior(hstack(model.data().inputs(), cand));
      Rng local(seed);
      const Eigen::MatrixXd draws = transform_normals(post, standard_normals(post.size(), params.n_mc, params.sampler, local));
      sel.scores[c] = inv_m * mean_improvement(draws, index_range(0, n), index_range(0, n + 2));
      sel.core_sizes[c] = static_cast<std::size_t>(n + 2);
    }
  } else {
    // Joint current posterior over [xhat, evaluation grid, search grid].
    const Eigen::MatrixXd eval = axis_grid(xhat, axis, params.j_og);
    const Eigen::Index g0 = 1, s0 = 1 + params.j_og;
    Eigen::MatrixXd u(dim, s0 + params.j_sg);
    u << xhat, eval, search;
    const PosteriorGaussian joint = model.posterior(u);
    const Eigen::MatrixXd& cov = joint.covariance;

    PosteriorGaussian core_post;
    core_post.mean = joint.mean.head(s0);
    core_post.covariance = cov.topLeftCorner(s0, s0);
    Rng local(seed);
    const Eigen::MatrixXd draws =
        transform_normals(core_post, standard_normals(s0, params.n_mc, params.sampler, local));

    const double k2 = kappa * kappa;
    const double s2 = model.noise_sq();
    const std::vector<Eigen::Index> prev{0};
    for (std::size_t c = 0; c < pairs.size(); ++c) {
      const Eigen::Index a = s0 + pairs[c].first, b = s0 + pairs[c].second;
      Eigen::Matrix2d scc;
      scc << cov(a, a) + s2, cov(a, b), cov(b, a), cov(b, b) + s2;
      const Eigen::Matrix2d inv = scc.inverse();
      std::vector<Eigen::Index> members;
      for (Eigen::Index g = g0; g < s0; ++g) {
        const Eigen::Vector2d sgc(cov(g, a), cov(g, b));
        const double v = cov(g, g) - sgc.dot(inv * sgc);
        if (v <= k2) members.push_back(g);
      }
      sel.core_sizes[c] = members.size();
      if (members.empty()) continue;
      sel.scores[c] = inv_m * mean_improvement(draws, prev, stride_subsample(members, params.max_core_points));
    }
  }

  bool any_core = false;
  for (auto s : sel.core_sizes) any_core = any_core || s > 0;
  if (!any_core) {
    sel.fallback = true;
    sel.points.resize(dim, 2);
    sel.points.col(0) = xhat;
    sel.points.col(1) = xhat;
    sel.points(axis, 0) = wrap_angle(xhat[axis] - kTwoPi / 3.0);
    sel.points(axis, 1) = wrap_angle(xhat[axis] + kTwoPi / 3.0);
    if (warning) *warning = "every candidate CoRe is empty (kappa=" + std::to_string(kappa) + "); using the +-2pi/3 pair";
    return sel;
  }
  sel.best = 0;
  for (std::size_t c = 1; c < pairs.size(); ++c)
    if (sel.scores[c] > sel.scores[static_cast<std::size_t>(sel.best)]) sel.best = static_cast<Eigen::Index>(c);
  const auto& p = pairs[static_cast<std::size_t>(sel.best)];
  sel.points.resize(dim, 2);
  sel.points << search.col(p.first), search.col(p.second);
  return sel;
}

}  // namespace vqebo
