// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "vqebo/pauli.hpp"

namespace vqebo {

enum class Boundary { open, periodic };

inline std::string to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

using Couplings = std::array<double, 3>;  // (X, Y, Z)

/// Real-weighted sum of Pauli strings on a fixed number of qubits.
class Hamiltonian {
 public:
  Hamiltonian(std::size_t qubits, std::vector<PauliString> terms)
      : qubits_(qubits), terms_(std::move(terms)) {
    if (qubits_ == 0) throw std::invalid_argument("Hamiltonian needs at least one qubit");
    if (terms_.empty()) throw std::invalid_argument("Hamiltonian needs at least one term");
    for (const auto& t : terms_) {
      if (t.qubits() != qubits_) throw std::invalid_argument("Pauli term qubit count mismatch");
    }
  }

  std::size_t qubits() const { return qubits_; }
  const std::vector<PauliString>& terms() const { return terms_; }

  std::string describe() const {
    std::string s;
    for (const auto& t : terms_) {
      if (!s.empty()) s += " + ";
      s += std::to_string(t.weight()) + "*" + t.label();
    }
    return s;
  }

 private:
  std::size_t qubits_;
  std::vector<PauliString> terms_;
};

/// Spin chain H = -[sum_j sum_a J_a s^a_j s^a_{j+1} + sum_j sum_a h_a s^a_j].
/// Terms are emitted couplings first (bond-major, then X,Y,Z), then fields.
/// Zero coefficients are dropped.
inline Hamiltonian build_hamiltonian(std::size_t qubits, const Couplings& j, const Couplings& h,
                                     Boundary boundary = Boundary::open) {
  if (qubits == 0) throw std::invalid_argument("build_hamiltonian: zero qubits");
  static constexpr Pauli kAxes[3] = {Pauli::X, Pauli::Y, Pauli::Z};

  std::vector<std::pair<std::size_t, std::size_t>> bonds;
  for (std::size_t q = 0; q + 1 < qubits; ++q) bonds.emplace_back(q, q + 1);
  if (boundary == Boundary::periodic && qubits > 2) bonds.emplace_back(qubits - 1, 0);

  std::vector<PauliString> terms;
  for (auto [a, b] : bonds) {
    for (int k = 0; k < 3; ++k) {
      if (j[k] == 0.0) continue;
      std::vector<Pauli> ops(qubits, Pauli::I);
      ops[a] = kAxes[k];
      ops[b] = kAxes[k];
      terms.emplace_back(std::move(ops), -j[k]);
    }
  }
  for (std::size_t q = 0; q < qubits; ++q) {
    for (int k = 0; k < 3; ++k) {
      if (h[k] == 0.0) continue;
      terms.push_back(PauliString::single(qubits, q, kAxes[k], -h[k]));
    }
  }
  return Hamiltonian(qubits, std::move(terms));
}

}  // namespace vqebo
