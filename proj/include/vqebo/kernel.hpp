// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vqebo {

enum class KernelFamily { vqe, vqe_higher_order, rbf, periodic };

inline std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::vqe: return "vqe";
    case KernelFamily::vqe_higher_order: return "vqe-higher-order";
    case KernelFamily::rbf: return "rbf";
    case KernelFamily::periodic: return "periodic";
  }
  return "?";
}

inline KernelFamily kernel_family_from_string(const std::string& s) {
  if (s == "vqe") return KernelFamily::vqe;
  if (s == "vqe-higher-order" || s == "vqe_higher_order") return KernelFamily::vqe_higher_order;
  if (s == "rbf") return KernelFamily::rbf;
  if (s == "periodic") return KernelFamily::periodic;
  throw std::invalid_argument("unknown kernel family: " + s);
}

struct KernelConfig {
  KernelFamily family = KernelFamily::vqe;
  double sigma0_sq = 1.0;
  double gamma = 2.0;
  /// Per-dimension sinusoid order V_d (higher-order family only).
  std::vector<int> orders;

  void validate() const {
    if (!(sigma0_sq > 0.0)) throw std::invalid_argument("sigma0_sq must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    for (int v : orders) {
      if (v < 1) throw std::invalid_argument("kernel orders must be >= 1");
    }
  }

  int order(Eigen::Index d) const {
    if (family != KernelFamily::vqe_higher_order) return 1;
    if (static_cast<std::size_t>(d) >= orders.size())
      throw std::invalid_argument("higher-order kernel: missing order for dimension " + std::to_string(d));
    return orders[static_cast<std::size_t>(d)];
  }
};

namespace detail {

inline void check_dims(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernel: dimension mismatch");
}

/// Per-axis factor of the (higher-order) vqe kernel and its derivative in x.
inline double vqe_factor(double delta, double gamma_sq, int order, double* deriv = nullptr) {
  double s = 0.0, ds = 0.0;
  for (int v = 1; v <= order; ++v) {
    s += std::cos(v * delta);
    if (deriv) ds -= v * std::sin(v * delta);
  }
  const double norm = gamma_sq + 2.0 * order;
  if (deriv) *deriv = 2.0 * ds / norm;
  return (gamma_sq + 2.0 * s) / norm;
}

}  // namespace detail

inline double kernel_eval(const KernelConfig& cfg, const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y) {
  detail::check_dims(x, y);
  const double g2 = cfg.gamma * cfg.gamma;
  switch (cfg.family) {
    case KernelFamily::vqe: {
      double k = cfg.sigma0_sq;
      for (Eigen::Index d = 0; d < x.size(); ++d) {
        const double c = std::cos(x[d]) * std::cos(y[d]) + std::sin(x[d]) * std::sin(y[d]);
        k *= (g2 + 2.0 * c) / (g2 + 2.0);
      }
      return k;
    }
    case KernelFamily::vqe_higher_order: {
      double k = cfg.sigma0_sq;
      for (Eigen::Index d = 0; d < x.size(); ++d) k *= detail::vqe_factor(x[d] - y[d], g2, cfg.order(d));
      return k;
    }
    case KernelFamily::rbf:
      return cfg.sigma0_sq * std::exp(-(x - y).squaredNorm() / (2.0 * g2));
    case KernelFamily::periodic: {
      double s = 0.0;
      for (Eigen::Index d = 0; d < x.size(); ++d) {
        const double h = std::sin(0.5 * (x[d] - y[d]));
        s += h * h;
      }
      return cfg.sigma0_sq * std::exp(-s / (2.0 * g2));
    }
  }
  throw std::logic_error("unknown kernel family");
}

/// d k(x, y) / d x.
inline Eigen::VectorXd kernel_gradient(const KernelConfig& cfg, const Eigen::Ref<const Eigen::VectorXd>& x,
                                       const Eigen::Ref<const Eigen::VectorXd>& y) {
  detail::check_dims(x, y);
  const Eigen::Index dim = x.size();
  const double g2 = cfg.gamma * cfg.gamma;
  Eigen::VectorXd grad(dim);
  switch (cfg.family) {
    case KernelFamily::vqe:
    case KernelFamily::vqe_higher_order: {
      // Product rule with prefix/suffix products; robust to zero factors.
      Eigen::VectorXd f(dim), df(dim);
      for (Eigen::Index d = 0; d < dim; ++d) {
        double der = 0.0;
        f[d] = detail::vqe_factor(x[d] - y[d], g2, cfg.order(d), &der);
        df[d] = der;
      }
      Eigen::VectorXd prefix(dim + 1), suffix(dim + 1);
      prefix[0] = 1.0;
      suffix[dim] = 1.0;
      for (Eigen::Index d = 0; d < dim; ++d) prefix[d + 1] = prefix[d] * f[d];
      for (Eigen::Index d = dim; d > 0; --d) suffix[d - 1] = suffix[d] * f[d - 1];
      for (Eigen::Index d = 0; d < dim; ++d) grad[d] = cfg.sigma0_sq * prefix[d] * df[d] * suffix[d + 1];
      return grad;
    }
    case KernelFamily::rbf: {
      const double k = kernel_eval(cfg, x, y);
      return -k * (x - y) / g2;
    }
    case KernelFamily::periodic: {
      const double k = kernel_eval(cfg, x, y);
      for (Eigen::Index d = 0; d < dim; ++d) grad[d] = -k * std::sin(x[d] - y[d]) / (4.0 * g2);
      return grad;
    }
  }
  throw std::logic_error("unknown kernel family");
}

/// Explicit finite feature map with k(x, y) = phi(x) . phi(y). Dimension 0 is
/// the slowest-varying index of the Kronecker product; within a dimension the
/// layout is (gamma, sqrt2 cos x, ..., sqrt2 cos Vx, sqrt2 sin x, ..., sqrt2 sin Vx).
inline Eigen::VectorXd feature_map(const KernelConfig& cfg, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (cfg.family != KernelFamily::vqe && cfg.family != KernelFamily::vqe_higher_order)
    throw std::invalid_argument("feature_map: only the vqe kernel families have a finite feature map");
  const double g2 = cfg.gamma * cfg.gamma;
  Eigen::VectorXd phi = Eigen::VectorXd::Constant(1, std::sqrt(cfg.sigma0_sq));
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    const int v_max = cfg.order(d);
    Eigen::VectorXd local(1 + 2 * v_max);
    local[0] = cfg.gamma;
    for (int v = 1; v <= v_max; ++v) {
      local[v] = std::sqrt(2.0) * std::cos(v * x[d]);
      local[v_max + v] = std::sqrt(2.0) * std::sin(v * x[d]);
    }
    local /= std::sqrt(g2 + 2.0 * v_max);
    Eigen::VectorXd next(phi.size() * local.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) next.segment(i * local.size(), local.size()) = phi[i] * local;
    phi = std::move(next);
  }
  return phi;
}

/// Gram matrix between the columns of `a` and the columns of `b`.
inline Eigen::MatrixXd kernel_matrix(const KernelConfig& cfg, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("kernel_matrix: dimension mismatch");
  Eigen::MatrixXd k(a.cols(), b.cols());
  if (cfg.family == KernelFamily::vqe) {
    // cos(x - y) = cos x cos y + sin x sin y, precomputed per coordinate.
    const Eigen::MatrixXd ca = a.array().cos(), sa = a.array().sin();
    const Eigen::MatrixXd cb = b.array().cos(), sb = b.array().sin();
    const double g2 = cfg.gamma * cfg.gamma;
    const double inv = 1.0 / (g2 + 2.0);
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      for (Eigen::Index i = 0; i < a.cols(); ++i) {
        double v = cfg.sigma0_sq;
        for (Eigen::Index d = 0; d < a.rows(); ++d) {
          v *= (g2 + 2.0 * (ca(d, i) * cb(d, j) + sa(d, i) * sb(d, j))) * inv;
        }
        k(i, j) = v;
      }
    }
    return k;
  }
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    for (Eigen::Index i = 0; i < a.cols(); ++i) k(i, j) = kernel_eval(cfg, a.col(i), b.col(j));
  return k;
}

inline Eigen::MatrixXd kernel_matrix(const KernelConfig& cfg, const Eigen::MatrixXd& a) {
  Eigen::MatrixXd k = kernel_matrix(cfg, a, a);
  return 0.5 * (k + k.transpose());
}

}  // namespace vqebo
