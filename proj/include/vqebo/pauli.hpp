// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vqebo {

enum class Pauli : std::uint8_t { I, X, Y, Z };

inline char to_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

inline Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': case 'i': case '_': return Pauli::I;
    case 'X': case 'x': return Pauli::X;
    case 'Y': case 'y': return Pauli::Y;
    case 'Z': case 'z': return Pauli::Z;
    default: throw std::invalid_argument(std::string("not a Pauli tag: ") + c);
  }
}

/// Weighted tensor product of single-qubit Paulis. Position q of `ops` acts on
/// qubit q, which is bit q of a computational-basis index.
class PauliString {
 public:
  PauliString() = default;

  PauliString(std::vector<Pauli> ops, double weight) : ops_(std::move(ops)), weight_(weight) {
    if (ops_.empty()) throw std::invalid_argument("PauliString needs at least one qubit");
    if (ops_.size() > 62) throw std::invalid_argument("PauliString supports at most 62 qubits");
    for (std::size_t q = 0; q < ops_.size(); ++q) {
      const auto bit = std::uint64_t{1} << q;
      switch (ops_[q]) {
        case Pauli::I: break;
        case Pauli::X: x_mask_ |= bit; break;
        case Pauli::Y: x_mask_ |= bit; z_mask_ |= bit; ++num_y_; break;
        case Pauli::Z: z_mask_ |= bit; break;
      }
    }
  }

  /// "XZI" style label, qubit 0 first.
  static PauliString parse(std::string_view label, double weight = 1.0) {
    std::vector<Pauli> ops;
    ops.reserve(label.size());
    for (char c : label) ops.push_back(pauli_from_char(c));
    return PauliString(std::move(ops), weight);
  }

  static PauliString single(std::size_t qubits, std::size_t q, Pauli p, double weight = 1.0) {
    std::vector<Pauli> ops(qubits, Pauli::I);
    ops.at(q) = p;
    return PauliString(std::move(ops), weight);
  }

  std::size_t qubits() const { return ops_.size(); }
  const std::vector<Pauli>& ops() const { return ops_; }
  double weight() const { return weight_; }
  bool is_identity() const { return x_mask_ == 0 && z_mask_ == 0; }

  std::uint64_t x_mask() const { return x_mask_; }
  std::uint64_t z_mask() const { return z_mask_; }

  std::string label() const {
    std::string s;
    for (auto p : ops_) s.push_back(to_char(p));
    return s;
  }

  /// P|i> = phase(i) |i ^ x_mask>.
  std::complex<double> phase(std::uint64_t basis_index) const {
    static constexpr std::complex<double> kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const bool odd = std::popcount(basis_index & z_mask_) & 1;
    const auto p = kIPow[num_y_ & 3];
    return odd ? -p : p;
  }

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.ops_ == b.ops_ && a.weight_ == b.weight_;
  }

 private:
  std::vector<Pauli> ops_;
  double weight_ = 0.0;
  std::uint64_t x_mask_ = 0;
  std::uint64_t z_mask_ = 0;
  int num_y_ = 0;
};

}  // namespace vqebo
