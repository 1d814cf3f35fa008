// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "vqebo/common.hpp"
#include "vqebo/pauli.hpp"

namespace vqebo {

/// CNOT-block connectivity. `open` and `periodic` are adjacent pairs (chain,
/// ring); `full` entangles every ordered pair (i < j).
enum class Entanglement { open, periodic, full };

inline std::string to_string(Entanglement e) {
  switch (e) {
    case Entanglement::open: return "open";
    case Entanglement::periodic: return "periodic";
    case Entanglement::full: return "full";
  }
  return "?";
}

/// exp(-i theta P / 2). `param` indexes the angle vector; without one the gate
/// uses the fixed `angle`.
struct RotationGate {
  PauliString axis;
  std::optional<std::size_t> param;
  double angle = 0.0;
};

struct CnotGate {
  std::size_t control;
  std::size_t target;
};

using Gate = std::variant<RotationGate, CnotGate>;

struct CircuitSpec {
  std::size_t qubits = 0;
  std::size_t layers = 0;
  std::vector<Gate> gates;
  std::size_t param_count = 0;

  /// Number of gates driven by each parameter (V_d).
  std::vector<int> multiplicities() const {
    std::vector<int> v(param_count, 0);
    for (const auto& g : gates) {
      if (const auto* r = std::get_if<RotationGate>(&g); r && r->param) ++v.at(*r->param);
    }
    return v;
  }

  bool is_exclusive() const {
    for (int m : multiplicities()) {
      if (m != 1) return false;
    }
    return true;
  }

  void validate() const {
    if (qubits == 0) throw std::invalid_argument("circuit needs at least one qubit");
    for (const auto& g : gates) {
      if (const auto* r = std::get_if<RotationGate>(&g)) {
        if (r->axis.qubits() != qubits) throw std::invalid_argument("rotation axis qubit mismatch");
        if (r->param && *r->param >= param_count) throw std::invalid_argument("parameter index out of range");
      } else {
        const auto& c = std::get<CnotGate>(g);
        if (c.control >= qubits || c.target >= qubits || c.control == c.target)
          throw std::invalid_argument("invalid CNOT");
      }
    }
    for (int m : multiplicities()) {
      if (m < 1) throw std::invalid_argument("every parameter must drive at least one gate");
    }
  }
};

/// EfficientSU2-style ansatz: an R_Y/R_Z pair per qubit, then per layer a CNOT
/// block followed by another R_Y/R_Z pair per qubit. Within each rotation
/// layer the R_Y angles come first (qubit order), then the R_Z angles, so
/// D = 2Q + 2LQ.
inline CircuitSpec build_ansatz(std::size_t qubits, std::size_t layers,
                                Entanglement entanglement = Entanglement::open) {
  if (qubits == 0) throw std::invalid_argument("build_ansatz: zero qubits");
  CircuitSpec spec;
  spec.qubits = qubits;
  spec.layers = layers;

  std::size_t next = 0;
  auto rotation_layer = [&] {
    for (auto axis : {Pauli::Y, Pauli::Z}) {
      for (std::size_t q = 0; q < qubits; ++q) {
        spec.gates.emplace_back(RotationGate{PauliString::single(qubits, q, axis), next++, 0.0});
      }
    }
  };
  auto cnot_block = [&] {
    if (entanglement == Entanglement::full) {
      for (std::size_t a = 0; a < qubits; ++a)
        for (std::size_t b = a + 1; b < qubits; ++b) spec.gates.emplace_back(CnotGate{a, b});
      return;
    }
    for (std::size_t q = 0; q + 1 < qubits; ++q) spec.gates.emplace_back(CnotGate{q, q + 1});
    if (entanglement == Entanglement::periodic && qubits > 2)
      spec.gates.emplace_back(CnotGate{qubits - 1, 0});
  };

  rotation_layer();
  for (std::size_t l = 0; l < layers; ++l) {
    cnot_block();
    rotation_layer();
  }
  spec.param_count = next;
  return spec;
}

class Statevector {
 public:
  using Amplitudes = Eigen::VectorXcd;

  explicit Statevector(std::size_t qubits) : qubits_(qubits), amps_(Amplitudes::Zero(dim_of(qubits))) {
    amps_[0] = 1.0;
  }

  Statevector(std::size_t qubits, Amplitudes amps) : qubits_(qubits), amps_(std::move(amps)) {
    if (amps_.size() != dim_of(qubits)) throw std::invalid_argument("amplitude count must be 2^Q");
  }

  std::size_t qubits() const { return qubits_; }
  Eigen::Index dim() const { return amps_.size(); }
  const Amplitudes& amplitudes() const { return amps_; }
  Amplitudes& amplitudes() { return amps_; }
  std::complex<double> operator[](Eigen::Index i) const { return amps_[i]; }

  double norm() const { return amps_.norm(); }

  void normalize() {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
    amps_ /= n;
  }

  /// Returns P|psi> (weight ignored).
  Amplitudes apply_pauli(const PauliString& p) const {
    Amplitudes out(amps_.size());
    const auto x = p.x_mask();
    for (Eigen::Index i = 0; i < amps_.size(); ++i) {
      const auto ui = static_cast<std::uint64_t>(i);
      out[static_cast<Eigen::Index>(ui ^ x)] = p.phase(ui) * amps_[i];
    }
    return out;
  }

  /// In-place exp(-i theta P / 2) = cos(theta/2) - i sin(theta/2) P.
  void rotate(const PauliString& p, double theta) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const Amplitudes moved = apply_pauli(p);
    amps_ = c * amps_ - std::complex<double>(0.0, s) * moved;
  }

  void cnot(std::size_t control, std::size_t target) {
    const auto cbit = std::uint64_t{1} << control;
    const auto tbit = std::uint64_t{1} << target;
    for (Eigen::Index i = 0; i < amps_.size(); ++i) {
      const auto ui = static_cast<std::uint64_t>(i);
      if ((ui & cbit) && !(ui & tbit)) std::swap(amps_[i], amps_[static_cast<Eigen::Index>(ui | tbit)]);
    }
  }

 private:
  static Eigen::Index dim_of(std::size_t q) {
    if (q == 0 || q > 30) throw std::invalid_argument("statevector supports 1..30 qubits");
    return Eigen::Index{1} << q;
  }

  std::size_t qubits_;
  Amplitudes amps_;
};

/// |psi_x> = G(x)|0...0>. Angles are wrapped into [0, 2pi) first.
inline Statevector apply_circuit(const CircuitSpec& spec, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != spec.param_count)
    throw std::invalid_argument("apply_circuit: expected " + std::to_string(spec.param_count) +
                                " parameters, got " + std::to_string(x.size()));
  Statevector psi(spec.qubits);
  for (const auto& g : spec.gates) {
    if (const auto* r = std::get_if<RotationGate>(&g)) {
      const double theta = r->param ? wrap_angle(x[static_cast<Eigen::Index>(*r->param)]) : r->angle;
      psi.rotate(r->axis, theta);
    } else {
      const auto& c = std::get<CnotGate>(g);
      psi.cnot(c.control, c.target);
    }
  }
  return psi;
}

}  // namespace vqebo
