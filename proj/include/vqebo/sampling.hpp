// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>
#include <boost/random/sobol.hpp>

#include "vqebo/common.hpp"
#include "vqebo/gp.hpp"

namespace vqebo {

enum class Sampler { plain_mc, low_discrepancy };

inline std::string to_string(Sampler s) { return s == Sampler::plain_mc ? "mc" : "qmc"; }

inline Sampler sampler_from_string(const std::string& s) {
  if (s == "mc" || s == "plain-mc" || s == "plain_mc") return Sampler::plain_mc;
  if (s == "qmc" || s == "sobol" || s == "low-discrepancy" || s == "low_discrepancy") return Sampler::low_discrepancy;
  throw std::invalid_argument("unknown sampler: " + s);
}

/// dim x n matrix of standard-normal variates. The low-discrepancy variant
/// takes consecutive Sobol points, XOR-shifts every coordinate by a
/// seed-derived 64-bit word and maps the centred cell through the normal
/// quantile.
inline Eigen::MatrixXd standard_normals(Eigen::Index dim, Eigen::Index n, Sampler sampler, Rng& rng) {
  if (dim < 0 || n < 0) throw std::invalid_argument("standard_normals: negative size");
  Eigen::MatrixXd z(dim, n);
  if (dim == 0 || n == 0) return z;
  if (sampler == Sampler::plain_mc) {
    std::normal_distribution<double> nd;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < dim; ++i) z(i, j) = nd(rng);
    return z;
  }
  std::vector<std::uint64_t> shift(static_cast<std::size_t>(dim));
  for (auto& s : shift) s = rng();
  boost::random::sobol seq(static_cast<std::size_t>(dim));
  const boost::math::normal_distribution<double> std_normal;
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const std::uint64_t v = static_cast<std::uint64_t>(seq()) ^ shift[static_cast<std::size_t>(i)];
      const double u = (static_cast<double>(v >> 11) + 0.5) * kScale;
      z(i, j) = boost::math::quantile(std_normal, u);
    }
  }
  return z;
}

/// Draws (columns) mean + R z with R R^T = covariance.
inline Eigen::MatrixXd transform_normals(const PosteriorGaussian& post, const Eigen::MatrixXd& z) {
  if (z.rows() != post.size()) throw std::invalid_argument("transform_normals: dimension mismatch");
  Eigen::MatrixXd draws = symmetric_root(post.covariance) * z;
  draws.colwise() += post.mean;
  return draws;
}

/// n joint draws from the Gaussian, one per column (M x n).
inline Eigen::MatrixXd posterior_sample(const PosteriorGaussian& post, Eigen::Index n, Sampler sampler, Rng& rng) {
  return transform_normals(post, standard_normals(post.size(), n, sampler, rng));
}

}  // namespace vqebo
