// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "vqebo/circuit.hpp"
#include "vqebo/common.hpp"
#include "vqebo/hamiltonian.hpp"

namespace vqebo {

inline constexpr double kImagResidueLimit = 1e-8;

/// <psi|P|psi> for a single Pauli string (weight ignored). Real by hermiticity.
inline double pauli_expectation(const PauliString& p, const Statevector& psi) {
  if (p.qubits() != psi.qubits()) throw std::invalid_argument("pauli_expectation: qubit mismatch");
  const auto& a = psi.amplitudes();
  const auto x = p.x_mask();
  std::complex<double> acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const auto ui = static_cast<std::uint64_t>(i);
    acc += std::conj(a[static_cast<Eigen::Index>(ui ^ x)]) * p.phase(ui) * a[i];
  }
  if (std::abs(acc.imag()) > kImagResidueLimit)
    throw std::runtime_error("non-negligible imaginary part in Pauli expectation");
  return std::clamp(acc.real(), -1.0, 1.0);
}

/// Per-term expectations m_k = <P_k>.
inline std::vector<double> term_expectations(const Hamiltonian& h, const Statevector& psi) {
  if (h.qubits() != psi.qubits()) throw std::invalid_argument("expectation: qubit count mismatch");
  std::vector<double> m;
  m.reserve(h.terms().size());
  for (const auto& t : h.terms()) m.push_back(pauli_expectation(t, psi));
  return m;
}

inline double expectation(const Hamiltonian& h, const Statevector& psi) {
  const auto m = term_expectations(h, psi);
  double e = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) e += h.terms()[k].weight() * m[k];
  return e;
}

enum class ObservationMode { binomial, gaussian, exact };

inline std::string to_string(ObservationMode m) {
  switch (m) {
    case ObservationMode::binomial: return "binomial";
    case ObservationMode::gaussian: return "gaussian";
    case ObservationMode::exact: return "exact";
  }
  return "?";
}

struct ObservationConfig {
  long n_shots = 1024;
  ObservationMode mode = ObservationMode::binomial;

  void validate() const {
    if (n_shots < 1) throw std::invalid_argument("n_shots must be >= 1");
  }
};

/// sigma*^2 = sum_k w_k^2 (1 - m_k^2) / n_shots, each term measured on its own shots.
inline double noise_variance(const Hamiltonian& h, const Statevector& psi, const ObservationConfig& cfg) {
  cfg.validate();
  if (cfg.mode == ObservationMode::exact) return 0.0;
  const auto m = term_expectations(h, psi);
  double v = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double w = h.terms()[k].weight();
    v += w * w * std::max(0.0, 1.0 - m[k] * m[k]);
  }
  return v / static_cast<double>(cfg.n_shots);
}

/// One noisy energy reading of |psi>.
inline double observe(const Hamiltonian& h, const Statevector& psi, const ObservationConfig& cfg, Rng& rng) {
  cfg.validate();
  switch (cfg.mode) {
    case ObservationMode::exact:
      return expectation(h, psi);
    case ObservationMode::gaussian: {
      std::normal_distribution<double> n(0.0, std::sqrt(noise_variance(h, psi, cfg)));
      return expectation(h, psi) + n(rng);
    }
    case ObservationMode::binomial: {
      const auto m = term_expectations(h, psi);
      double y = 0.0;
      for (std::size_t k = 0; k < m.size(); ++k) {
        const double p = std::clamp(0.5 * (1.0 + m[k]), 0.0, 1.0);
        std::binomial_distribution<long> b(cfg.n_shots, p);
        const double s = static_cast<double>(b(rng));
        y += h.terms()[k].weight() * (2.0 * s / static_cast<double>(cfg.n_shots) - 1.0);
      }
      return y;
    }
  }
  throw std::logic_error("unknown observation mode");
}

/// |<a|b>|^2, computed so that swapping the arguments is bit-identical.
inline double fidelity(const Statevector& a, const Statevector& b) {
  if (a.qubits() != b.qubits()) throw std::invalid_argument("fidelity: qubit count mismatch");
  double re = 0.0, im = 0.0;
  const auto& x = a.amplitudes();
  const auto& y = b.amplitudes();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
  }
  return std::clamp(re * re + im * im, 0.0, 1.0);
}

inline constexpr std::size_t kMaxDiagonalizationQubits = 12;

/// Dense 2^Q x 2^Q matrix of H.
inline Eigen::MatrixXcd dense_matrix(const Hamiltonian& h) {
  const Eigen::Index dim = Eigen::Index{1} << h.qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h.terms()) {
    const auto x = t.x_mask();
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto ui = static_cast<std::uint64_t>(i);
      m(static_cast<Eigen::Index>(ui ^ x), i) += t.weight() * t.phase(ui);
    }
  }
  return m;
}

struct GroundState {
  double energy = 0.0;
  Statevector state{1};
  /// Orthonormal basis of the ground space (contains `state`).
  std::vector<Statevector> ground_space;
  bool degenerate = false;

  /// Weight of |psi> in the ground space: sum_i |<g_i|psi>|^2.
  double fidelity_of(const Statevector& psi) const {
    double f = 0.0;
    for (const auto& g : ground_space) f += fidelity(g, psi);
    return std::min(f, 1.0);
  }
};

inline GroundState ground_state(const Hamiltonian& h, double degeneracy_tol = 1e-8) {
  if (h.qubits() > kMaxDiagonalizationQubits)
    throw std::invalid_argument("ground_state: at most " + std::to_string(kMaxDiagonalizationQubits) +
                                " qubits are diagonalized densely");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_matrix(h));
  if (es.info() != Eigen::Success) throw std::runtime_error("ground_state: eigensolver failed");
  const auto& evals = es.eigenvalues();
  GroundState gs;
  gs.energy = evals[0];
  const double tol = degeneracy_tol * std::max(1.0, std::abs(gs.energy));
  for (Eigen::Index k = 0; k < evals.size() && evals[k] - evals[0] <= tol; ++k) {
    Statevector v(h.qubits(), es.eigenvectors().col(k));
    v.normalize();
    gs.ground_space.push_back(std::move(v));
  }
  gs.state = gs.ground_space.front();
  gs.degenerate = gs.ground_space.size() > 1;
  return gs;
}

/// Noiseless VQE objective f*(x) = <psi_x|H|psi_x>.
struct VqeProblem {
  CircuitSpec circuit;
  Hamiltonian hamiltonian;

  std::size_t dim() const { return circuit.param_count; }

  double energy(const Eigen::VectorXd& x) const { return expectation(hamiltonian, apply_circuit(circuit, x)); }
};

/// Component d is [f*(x + pi/2 e_d) - f*(x - pi/2 e_d)] / 2 (noiseless).
inline Eigen::VectorXd parameter_shift_gradient(const CircuitSpec& spec, const Hamiltonian& h,
                                                const Eigen::VectorXd& x) {
  if (!spec.is_exclusive())
    throw std::invalid_argument("parameter shift rule in this form needs exclusive parametrization");
  if (static_cast<std::size_t>(x.size()) != spec.param_count)
    throw std::invalid_argument("parameter_shift_gradient: wrong parameter count");
  Eigen::VectorXd g(x.size());
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    Eigen::VectorXd plus = x, minus = x;
    plus[d] += 0.5 * std::numbers::pi;
    minus[d] -= 0.5 * std::numbers::pi;
    g[d] = 0.5 * (expectation(h, apply_circuit(spec, plus)) - expectation(h, apply_circuit(spec, minus)));
  }
  return g;
}

}  // namespace vqebo
