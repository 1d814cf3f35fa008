// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "vqebo/common.hpp"
#include "vqebo/kernel.hpp"

namespace vqebo {

/// Jitter ladder, relative to the mean diagonal of the matrix.
inline constexpr double kJitterLadder[] = {0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6};

struct JitteredCholesky {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;  // absolute amount added to the diagonal
};

inline JitteredCholesky jittered_cholesky(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("jittered_cholesky: matrix not square");
  JitteredCholesky out;
  if (a.rows() == 0) {
    out.llt.compute(a);
    return out;
  }
  const double scale = std::max(a.diagonal().cwiseAbs().mean(), 1e-300);
  for (double rel : kJitterLadder) {
    Eigen::MatrixXd m = a;
    m.diagonal().array() += rel * scale;
    out.llt.compute(m);
    if (out.llt.info() == Eigen::Success) {
      const Eigen::VectorXd d = out.llt.matrixLLT().diagonal();
      if ((d.array() > 0.0).all() && d.allFinite()) {
        out.jitter = rel * scale;
        return out;
      }
    }
  }
  throw FactorizationError("matrix is not positive definite even after jitter 1e-6 x mean diagonal");
}

/// Root R with R R^T = S for a symmetric PSD S, via eigendecomposition.
/// Eigenvalues slightly below zero (round-off) are clamped; eigenvalues at the
/// round-off level relative to the largest one are dropped so that samples
/// stay exactly inside the range of S.
inline Eigen::MatrixXd symmetric_root(const Eigen::MatrixXd& s) {
  const Eigen::Index m = s.rows();
  if (m != s.cols()) throw std::invalid_argument("symmetric_root: matrix not square");
  if (m == 0) return Eigen::MatrixXd(0, 0);
  const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  const double scale = sym.diagonal().cwiseAbs().maxCoeff();
  if (scale == 0.0) return Eigen::MatrixXd::Zero(m, m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw FactorizationError("symmetric_root: eigensolver failed");
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-6 * scale)
    throw FactorizationError("covariance has eigenvalue " + std::to_string(ev.minCoeff()) + " (not PSD)");
  const double floor = 1e-13 * std::max(ev.maxCoeff(), 0.0);
  for (Eigen::Index i = 0; i < m; ++i) ev[i] = ev[i] > floor ? std::sqrt(ev[i]) : 0.0;
  return es.eigenvectors() * ev.asDiagonal();
}

/// Training data; inputs are stored column-wise (D x N) and wrapped to [0, 2pi).
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Eigen::Index dim) : inputs_(dim, 0) {}
  Dataset(const Eigen::MatrixXd& inputs, Eigen::VectorXd outputs) : inputs_(inputs.rows(), inputs.cols()),
                                                                   outputs_(std::move(outputs)) {
    if (inputs.cols() != outputs_.size()) throw std::invalid_argument("Dataset: input/output count mismatch");
    for (Eigen::Index i = 0; i < inputs.cols(); ++i) inputs_.col(i) = wrap_angles(inputs.col(i));
  }

  Eigen::Index size() const { return outputs_.size(); }
  Eigen::Index dim() const { return inputs_.rows(); }
  bool empty() const { return size() == 0; }
  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const Eigen::VectorXd& outputs() const { return outputs_; }

  void add(const Eigen::VectorXd& x, double y) {
    if (inputs_.rows() == 0 && inputs_.cols() == 0) inputs_.resize(x.size(), 0);
    if (x.size() != dim()) throw std::invalid_argument("Dataset::add: dimension mismatch");
    const Eigen::Index n = size();
    inputs_.conservativeResize(Eigen::NoChange, n + 1);
    inputs_.col(n) = wrap_angles(x);
    outputs_.conservativeResize(n + 1);
    outputs_[n] = y;
  }

  /// Drops the `count` oldest points.
  void drop_oldest(Eigen::Index count) {
    count = std::min(count, size());
    const Eigen::Index keep = size() - count;
    inputs_ = inputs_.rightCols(keep).eval();
    outputs_ = outputs_.tail(keep).eval();
  }

 private:
  Eigen::MatrixXd inputs_;
  Eigen::VectorXd outputs_;
};

struct PosteriorGaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  Eigen::Index size() const { return mean.size(); }
};

/// Zero-mean GP regression model; immutable once constructed.
class GPModel {
 public:
  GPModel(KernelConfig kernel, double noise_sq, Dataset data)
      : kernel_(std::move(kernel)), noise_sq_(noise_sq), data_(std::move(data)) {
    kernel_.validate();
    if (!(noise_sq_ >= 0.0)) throw std::invalid_argument("noise variance must be >= 0");
    const Eigen::Index n = data_.size();
    Eigen::MatrixXd k = kernel_matrix(kernel_, data_.inputs());
    k.diagonal().array() += noise_sq_;
    chol_ = jittered_cholesky(k);
    alpha_ = n > 0 ? chol_.llt.solve(data_.outputs()) : Eigen::VectorXd();
    if (kernel_.family == KernelFamily::vqe && n > 0) {
      cos_ = data_.inputs().array().cos();
      sin_ = data_.inputs().array().sin();
    }
  }

  const KernelConfig& kernel() const { return kernel_; }
  double noise_sq() const { return noise_sq_; }
  const Dataset& data() const { return data_; }
  double jitter() const { return chol_.jitter; }
  Eigen::Index size() const { return data_.size(); }

  /// K(X, test) (N x M).
  Eigen::MatrixXd cross(const Eigen::MatrixXd& test) const { return kernel_matrix(kernel_, data_.inputs(), test); }

  Eigen::VectorXd mean(const Eigen::MatrixXd& test) const {
    check(test);
    if (size() == 0) return Eigen::VectorXd::Zero(test.cols());
    return cross(test).transpose() * alpha_;
  }

  double mean(const Eigen::VectorXd& x) const { return mean(Eigen::MatrixXd(x))[0]; }

  /// Marginal posterior variances at the test columns.
  Eigen::VectorXd variance(const Eigen::MatrixXd& test) const {
    check(test);
    Eigen::VectorXd prior(test.cols());
    for (Eigen::Index j = 0; j < test.cols(); ++j) prior[j] = kernel_eval(kernel_, test.col(j), test.col(j));
    if (size() == 0) return prior;
    const Eigen::MatrixXd v = chol_.llt.matrixL().solve(cross(test));
    return (prior - v.colwise().squaredNorm().transpose()).cwiseMax(0.0);
  }

  PosteriorGaussian posterior(const Eigen::MatrixXd& test) const {
    check(test);
    PosteriorGaussian p;
    Eigen::MatrixXd prior = kernel_matrix(kernel_, test);
    if (size() == 0) {
      p.mean = Eigen::VectorXd::Zero(test.cols());
      p.covariance = std::move(prior);
      return p;
    }
    const Eigen::MatrixXd kx = cross(test);
    p.mean = kx.transpose() * alpha_;
    const Eigen::MatrixXd v = chol_.llt.matrixL().solve(kx);
    Eigen::MatrixXd cov = prior - v.transpose() * v;
    p.covariance = 0.5 * (cov + cov.transpose());
    return p;
  }

  /// Posterior mean, standard deviation and their gradients at a single point.
  void mean_sd_gradient(const Eigen::VectorXd& x, double& mu, double& sd, Eigen::VectorXd& dmu,
                        Eigen::VectorXd& dsd) const {
    const Eigen::Index dim = x.size();
    const double prior = kernel_eval(kernel_, x, x);
    dmu = Eigen::VectorXd::Zero(dim);
    dsd = Eigen::VectorXd::Zero(dim);
    if (size() == 0) {
      mu = 0.0;
      sd = std::sqrt(prior);
      return;
    }
    const Eigen::Index n = size();
    Eigen::VectorXd kx(n);
    Eigen::MatrixXd grad(dim, n);
    if (kernel_.family == KernelFamily::vqe) {
      vqe_row(x, kx, grad);
    } else {
      for (Eigen::Index i = 0; i < n; ++i) {
        kx[i] = kernel_eval(kernel_, x, data_.inputs().col(i));
        grad.col(i) = kernel_gradient(kernel_, x, data_.inputs().col(i));
      }
    }
    mu = kx.dot(alpha_);
    dmu = grad * alpha_;
    const Eigen::VectorXd w = chol_.llt.solve(kx);
    const double var = std::max(prior - kx.dot(w), 0.0);
    sd = std::sqrt(var);
    if (sd > 1e-12) dsd = -(grad * w) / sd;
  }

  /// log N(y | 0, K + sigma^2 I).
  double log_marginal_likelihood() const {
    const Eigen::Index n = size();
    if (n == 0) throw std::invalid_argument("log marginal likelihood needs at least one observation");
    const auto l = chol_.llt.matrixL().toDenseMatrix();
    const double logdet_half = l.diagonal().array().log().sum();
    return -0.5 * data_.outputs().dot(alpha_) - logdet_half -
           0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  }

 private:
  void check(const Eigen::MatrixXd& test) const {
    if (size() > 0 && test.rows() != data_.dim()) throw std::invalid_argument("GP query dimension mismatch");
  }

  // k(x, X) and its x-gradient using the cached cos/sin of the training inputs.
  void vqe_row(const Eigen::VectorXd& x, Eigen::VectorXd& kx, Eigen::MatrixXd& grad) const {
    const Eigen::Index dim = x.size(), n = size();
    const double g2 = kernel_.gamma * kernel_.gamma;
    const double inv = 1.0 / (g2 + 2.0);
    const Eigen::ArrayXd cx = x.array().cos(), sx = x.array().sin();
    Eigen::ArrayXd f(dim), df(dim), prefix(dim + 1), suffix(dim + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ct = cos_.col(i).array();
      const auto st = sin_.col(i).array();
      f = (g2 + 2.0 * (cx * ct + sx * st)) * inv;
      df = 2.0 * (cx * st - sx * ct) * inv;
      prefix[0] = kernel_.sigma0_sq;
      suffix[dim] = 1.0;
      for (Eigen::Index d = 0; d < dim; ++d) prefix[d + 1] = prefix[d] * f[d];
      for (Eigen::Index d = dim; d > 0; --d) suffix[d - 1] = suffix[d] * f[d - 1];
      kx[i] = prefix[dim];
      for (Eigen::Index d = 0; d < dim; ++d) grad(d, i) = prefix[d] * df[d] * suffix[d + 1];
    }
  }

  KernelConfig kernel_;
  double noise_sq_;
  Dataset data_;
  JitteredCholesky chol_;
  Eigen::VectorXd alpha_;
  Eigen::MatrixXd cos_, sin_;
};

inline PosteriorGaussian gp_posterior(const GPModel& model, const Eigen::MatrixXd& test) {
  return model.posterior(test);
}

inline double log_marginal_likelihood(const GPModel& model) { return model.log_marginal_likelihood(); }

}  // namespace vqebo
