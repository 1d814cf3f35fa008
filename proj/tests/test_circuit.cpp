// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "vqebo/circuit.hpp"
#include "vqebo/hamiltonian.hpp"
#include "vqebo/simulator.hpp"
#include "vqebo/sinusoid.hpp"

using namespace vqebo;
using cd = std::complex<double>;

namespace {

const double kPi = std::numbers::pi;

// Explicit 2x2 matrices, combined by Kronecker products (qubit 0 is the
// least significant bit, so it sits rightmost in the product).
Eigen::Matrix2cd pauli_matrix(Pauli p) {
  Eigen::Matrix2cd m;
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, cd(0, -1), cd(0, 1), 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::MatrixXcd on_qubit(const Eigen::Matrix2cd& g, std::size_t q, std::size_t qubits) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  for (std::size_t k = qubits; k-- > 0;) m = kron(m, k == q ? Eigen::MatrixXcd(g) : Eigen::MatrixXcd(Eigen::Matrix2cd::Identity()));
  return m;
}

Eigen::MatrixXcd dense_oracle(const Hamiltonian& h) {
  const auto dim = Eigen::Index{1} << h.qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h.terms()) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(1, 1);
    for (std::size_t k = h.qubits(); k-- > 0;) p = kron(p, pauli_matrix(t.ops()[k]));
    m += t.weight() * p;
  }
  return m;
}

Eigen::Matrix2cd ry(double t) {
  Eigen::Matrix2cd m;
  m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
  return m;
}

Eigen::Matrix2cd rz(double t) {
  Eigen::Matrix2cd m;
  m << std::exp(cd(0, -t / 2)), 0, 0, std::exp(cd(0, t / 2));
  return m;
}

Statevector random_state(std::size_t qubits, Rng& rng) {
  std::normal_distribution<double> n;
  Eigen::VectorXcd a(Eigen::Index{1} << qubits);
  for (auto& v : a) v = cd(n(rng), n(rng));
  Statevector s(qubits, a);
  s.normalize();
  return s;
}

Hamiltonian ising(std::size_t q) { return build_hamiltonian(q, {-1, 0, 0}, {0, 0, -1}); }

// Faddeev-LeVerrier characteristic polynomial, smallest real root by bisection.
double smallest_eigenvalue_by_charpoly(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  std::vector<double> c(static_cast<std::size_t>(n + 1));
  c[static_cast<std::size_t>(n)] = 1.0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(n - k + 1)] * Eigen::MatrixXd::Identity(n, n);
    c[static_cast<std::size_t>(n - k)] = -(a * m).trace() / static_cast<double>(k);
  }
  auto p = [&](double x) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
  };
  const double bound = a.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  // Scan for the first sign change from the left, then bisect.
  double lo = -bound, step = 1e-3;
  while (p(lo) * p(lo + step) > 0.0) lo += step;
  double hi = lo + step;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (p(lo) * p(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Ansatz, ParameterCounts) {
  EXPECT_EQ(build_ansatz(3, 2).param_count, 18u);
  EXPECT_EQ(build_ansatz(3, 3).param_count, 24u);
  EXPECT_EQ(build_ansatz(5, 3).param_count, 40u);
  EXPECT_EQ(build_ansatz(1, 0).param_count, 2u);
  EXPECT_THROW(build_ansatz(0, 1), std::invalid_argument);
}

TEST(Ansatz, ExclusiveAndValid) {
  for (auto e : {Entanglement::open, Entanglement::periodic, Entanglement::full}) {
    const auto spec = build_ansatz(4, 2, e);
    EXPECT_NO_THROW(spec.validate());
    EXPECT_TRUE(spec.is_exclusive());
  }
}

TEST(Ansatz, PeriodicAddsWrapCnot) {
  auto cnots = [](const CircuitSpec& s) {
    int n = 0;
    for (const auto& g : s.gates) n += std::holds_alternative<CnotGate>(g);
    return n;
  };
  EXPECT_EQ(cnots(build_ansatz(4, 1, Entanglement::open)), 3);
  EXPECT_EQ(cnots(build_ansatz(4, 1, Entanglement::periodic)), 4);
  EXPECT_EQ(cnots(build_ansatz(4, 1, Entanglement::full)), 6);
}

TEST(ApplyCircuit, ZeroAnglesGiveAllZeroState) {
  const auto spec = build_ansatz(3, 2);
  const auto psi = apply_circuit(spec, Eigen::VectorXd::Zero(18));
  EXPECT_NEAR(std::abs(psi[0]), 1.0, 1e-15);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
}

TEST(ApplyCircuit, SingleRyPiFlipsQubit) {
  CircuitSpec spec;
  spec.qubits = 1;
  spec.param_count = 1;
  spec.gates.emplace_back(RotationGate{PauliString::single(1, 0, Pauli::Y), 0, 0.0});
  const auto psi = apply_circuit(spec, Eigen::VectorXd::Constant(1, kPi));
  EXPECT_NEAR(std::abs(psi[1]), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(psi[0]), 0.0, 1e-15);
}

TEST(ApplyCircuit, MatchesDenseGateProduct) {
  Rng rng(11);
  const auto spec = build_ansatz(2, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd x = uniform_point(8, rng);
    // R_Y on q0,q1 (params 0,1), R_Z (2,3), CNOT(0->1), R_Y (4,5), R_Z (6,7).
    Eigen::MatrixXcd cnot = Eigen::MatrixXcd::Zero(4, 4);
    for (int i = 0; i < 4; ++i) cnot((i & 1) ? (i ^ 2) : i, i) = 1.0;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(4, 4);
    for (int layer = 0; layer < 2; ++layer) {
      if (layer == 1) u = cnot * u;
      const int base = 4 * layer;
      u = on_qubit(ry(x[base + 0]), 0, 2) * u;
      u = on_qubit(ry(x[base + 1]), 1, 2) * u;
      u = on_qubit(rz(x[base + 2]), 0, 2) * u;
      u = on_qubit(rz(x[base + 3]), 1, 2) * u;
    }
    const Eigen::VectorXcd expected = u.col(0);
    const auto psi = apply_circuit(spec, x);
    EXPECT_LT((psi.amplitudes() - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ApplyCircuit, WrongLengthThrows) {
  EXPECT_THROW(apply_circuit(build_ansatz(2, 1), Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(ApplyCircuit, AnglesAreWrapped) {
  Rng rng(3);
  const auto spec = build_ansatz(2, 1);
  const Eigen::VectorXd x = uniform_point(8, rng);
  const Eigen::VectorXd shifted = x.array() + 2.0 * kTwoPi;
  EXPECT_LT((apply_circuit(spec, x).amplitudes() - apply_circuit(spec, shifted).amplitudes()).norm(), 1e-12);
}

TEST(Hamiltonian, IsingTwoQubitTerms) {
  const auto h = ising(2);
  ASSERT_EQ(h.terms().size(), 3u);
  EXPECT_EQ(h.terms()[0].label(), "XX");
  EXPECT_DOUBLE_EQ(h.terms()[0].weight(), 1.0);
  EXPECT_EQ(h.terms()[1].label(), "ZI");
  EXPECT_EQ(h.terms()[2].label(), "IZ");
  EXPECT_DOUBLE_EQ(h.terms()[2].weight(), 1.0);
}

TEST(Hamiltonian, HeisenbergTermCount) {
  EXPECT_EQ(build_hamiltonian(5, {1, 1, 1}, {1, 1, 1}).terms().size(), 27u);
}

TEST(Hamiltonian, OffCriticalIsing) {
  const auto h = build_hamiltonian(3, {0, 0, -1}, {1.5, 0, 0});
  ASSERT_EQ(h.terms().size(), 5u);
  const char* labels[] = {"ZZI", "IZZ", "XII", "IXI", "IIX"};
  const double weights[] = {1, 1, -1.5, -1.5, -1.5};
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(h.terms()[static_cast<std::size_t>(i)].label(), labels[i]);
    EXPECT_DOUBLE_EQ(h.terms()[static_cast<std::size_t>(i)].weight(), weights[i]);
  }
}

TEST(Hamiltonian, PeriodicBoundaryAddsBond) {
  EXPECT_EQ(build_hamiltonian(4, {1, 1, 1}, {0, 0, 0}, Boundary::periodic).terms().size(), 12u);
  EXPECT_EQ(build_hamiltonian(2, {1, 1, 1}, {0, 0, 0}, Boundary::periodic).terms().size(), 3u);
}

TEST(Expectation, IsingOnAllZero) { EXPECT_NEAR(expectation(ising(2), Statevector(2)), 2.0, 1e-15); }

TEST(Expectation, MatchesDenseQuadraticForm) {
  Rng rng(5);
  for (std::size_t q : {1u, 2u, 3u}) {
    for (const auto& h : {ising(q), build_hamiltonian(q, {1, 1, 1}, {1, 1, 1})}) {
      const auto psi = random_state(q, rng);
      const cd e = psi.amplitudes().dot(dense_oracle(h) * psi.amplitudes());
      EXPECT_NEAR(expectation(h, psi), e.real(), 1e-10);
    }
  }
}

TEST(Expectation, EigenstateGivesEigenvalue) {
  const auto h = build_hamiltonian(3, {1, 1, 1}, {1, 1, 1});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_oracle(h));
  for (Eigen::Index k = 0; k < 8; ++k) {
    Statevector v(3, es.eigenvectors().col(k));
    EXPECT_NEAR(expectation(h, v), es.eigenvalues()[k], 1e-10);
  }
}

TEST(Expectation, QubitMismatchThrows) { EXPECT_THROW(expectation(ising(2), Statevector(3)), std::invalid_argument); }

TEST(Observe, EigenstateOfAllTermsIsNoiseless) {
  const auto h = build_hamiltonian(2, {0, 0, 1}, {0, 0, 1});
  Rng rng(1);
  ObservationConfig cfg{16, ObservationMode::binomial};
  for (int i = 0; i < 20; ++i) EXPECT_DOUBLE_EQ(observe(h, Statevector(2), cfg, rng), expectation(h, Statevector(2)));
  EXPECT_DOUBLE_EQ(noise_variance(h, Statevector(2), cfg), 0.0);
}

TEST(Observe, SingleTermUnitVariance) {
  const Hamiltonian h(1, {PauliString::parse("X", 1.0)});
  EXPECT_DOUBLE_EQ(noise_variance(h, Statevector(1), {1, ObservationMode::binomial}), 1.0);
}

TEST(Observe, ExactModeIsNoiseless) {
  Rng rng(2);
  const auto psi = random_state(2, rng);
  EXPECT_DOUBLE_EQ(observe(ising(2), psi, {1, ObservationMode::exact}, rng), expectation(ising(2), psi));
}

TEST(Observe, LargeShotCountApproachesExpectation) {
  Rng rng(4);
  const auto psi = random_state(2, rng);
  EXPECT_NEAR(observe(ising(2), psi, {100000000, ObservationMode::binomial}, rng), expectation(ising(2), psi), 1e-3);
}

TEST(Observe, BinomialIsUnbiasedAndVarianceMatches) {
  Rng rng(9);
  const auto h = ising(2);
  const auto psi = apply_circuit(build_ansatz(2, 1), uniform_point(8, rng));
  const ObservationConfig cfg{1024, ObservationMode::binomial};
  const double exact = expectation(h, psi), var = noise_variance(h, psi, cfg);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = observe(h, psi, cfg, rng);
    s += y;
    s2 += y * y;
  }
  const double mean = s / n, emp_var = (s2 - n * mean * mean) / (n - 1);
  EXPECT_LT(std::abs(mean - exact), 4.0 * std::sqrt(var / n));
  EXPECT_NEAR(emp_var / var, 1.0, 0.05);
}

TEST(Observe, GaussianModeMoments) {
  Rng rng(10);
  const auto h = ising(2);
  const auto psi = random_state(2, rng);
  const ObservationConfig cfg{256, ObservationMode::gaussian};
  const int n = 20000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = observe(h, psi, cfg, rng);
    s += y;
    s2 += y * y;
  }
  const double mean = s / n, var = noise_variance(h, psi, cfg);
  EXPECT_LT(std::abs(mean - expectation(h, psi)), 4.0 * std::sqrt(var / n));
  EXPECT_NEAR((s2 - n * mean * mean) / (n - 1) / var, 1.0, 0.05);
}

TEST(Observe, InvalidShotsThrow) {
  Rng rng(1);
  EXPECT_THROW(observe(ising(2), Statevector(2), {0, ObservationMode::binomial}, rng), std::invalid_argument);
}

TEST(GroundState, SingleQubitField) {
  const auto gs = ground_state(build_hamiltonian(1, {0, 0, 0}, {0, 0, -1}));
  EXPECT_NEAR(gs.energy, -1.0, 1e-12);
  EXPECT_NEAR(std::abs(gs.state[1]), 1.0, 1e-12);
}

TEST(GroundState, TwoQubitIsingMatchesCharacteristicPolynomial) {
  const auto h = ising(2);
  const double oracle = smallest_eigenvalue_by_charpoly(dense_oracle(h).real());
  EXPECT_NEAR(oracle, -std::sqrt(5.0), 1e-9);
  EXPECT_NEAR(ground_state(h).energy, oracle, 1e-9);
}

TEST(GroundState, FiveQubitIsingBelowPublishedConvergedEnergy) {
  const auto gs = ground_state(ising(5));
  EXPECT_LE(gs.energy, -5.97);
  EXPECT_NEAR(expectation(ising(5), gs.state), gs.energy, 1e-10);
}

TEST(GroundState, DegenerateSpaceIsFlagged) {
  // -Z0 Z1 has ground space {|00>, |11>}.
  const auto gs = ground_state(build_hamiltonian(2, {0, 0, 1}, {0, 0, 0}));
  EXPECT_TRUE(gs.degenerate);
  EXPECT_EQ(gs.ground_space.size(), 2u);
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(4);
  a[3] = 1.0;
  EXPECT_NEAR(gs.fidelity_of(Statevector(2, a)), 1.0, 1e-12);
}

TEST(GroundState, TooManyQubitsThrows) {
  EXPECT_THROW(ground_state(build_hamiltonian(13, {1, 0, 0}, {0, 0, 0})), std::invalid_argument);
}

TEST(Fidelity, BasicCases) {
  Rng rng(6);
  const auto a = random_state(3, rng);
  EXPECT_NEAR(fidelity(a, a), 1.0, 1e-12);
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(8), e1 = e0;
  e0[0] = 1.0;
  e1[5] = 1.0;
  EXPECT_DOUBLE_EQ(fidelity(Statevector(3, e0), Statevector(3, e1)), 0.0);
  for (double th : {0.3, 1.7, -2.9}) {
    Statevector b(3, a.amplitudes() * std::exp(cd(0, th)));
    EXPECT_NEAR(fidelity(a, b), 1.0, 1e-12);
  }
}

TEST(Fidelity, ExactlySymmetric) {
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const auto a = random_state(3, rng), b = random_state(3, rng);
    EXPECT_EQ(fidelity(a, b), fidelity(b, a));
  }
}

TEST(ParameterShift, MatchesFiniteDifferences) {
  Rng rng(12);
  const auto spec = build_ansatz(2, 1);
  const auto h = ising(2);
  const double step = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = uniform_point(8, rng);
    const Eigen::VectorXd g = parameter_shift_gradient(spec, h, x);
    for (Eigen::Index d = 0; d < 8; ++d) {
      Eigen::VectorXd p = x, m = x;
      p[d] += step;
      m[d] -= step;
      const double fd = (expectation(h, apply_circuit(spec, p)) - expectation(h, apply_circuit(spec, m))) / (2 * step);
      EXPECT_NEAR(g[d], fd, 1e-6);
    }
  }
}

TEST(ParameterShift, StationaryAndConstantDirections) {
  // Q=1: R_Z first (pure phase on |0>), then R_Y; H = Z gives f = cos(x1).
  CircuitSpec spec;
  spec.qubits = 1;
  spec.param_count = 2;
  spec.gates.emplace_back(RotationGate{PauliString::single(1, 0, Pauli::Z), 0, 0.0});
  spec.gates.emplace_back(RotationGate{PauliString::single(1, 0, Pauli::Y), 1, 0.0});
  const Hamiltonian h(1, {PauliString::parse("Z")});
  const Eigen::VectorXd g0 = parameter_shift_gradient(spec, h, Eigen::Vector2d(0.7, 0.0));
  EXPECT_NEAR(g0[1], 0.0, 1e-12);
  EXPECT_NEAR(g0[0], 0.0, 1e-12);
  const Eigen::VectorXd g1 = parameter_shift_gradient(spec, h, Eigen::Vector2d(1.1, 0.4));
  EXPECT_NEAR(g1[0], 0.0, 1e-12);
  EXPECT_NEAR(g1[1], -std::sin(0.4), 1e-12);
}

TEST(ParameterShift, SharedParameterRejected) {
  CircuitSpec spec;
  spec.qubits = 1;
  spec.param_count = 1;
  spec.gates.emplace_back(RotationGate{PauliString::single(1, 0, Pauli::Y), 0, 0.0});
  spec.gates.emplace_back(RotationGate{PauliString::single(1, 0, Pauli::Z), 0, 0.0});
  EXPECT_THROW(parameter_shift_gradient(spec, Hamiltonian(1, {PauliString::parse("Z")}), Eigen::VectorXd::Zero(1)),
               std::invalid_argument);
}

TEST(Properties, NormPreservedAndVariationalBound) {
  Rng rng(13);
  for (std::size_t q : {1u, 2u, 3u, 4u}) {
    const auto spec = build_ansatz(q, 2, Entanglement::periodic);
    const auto h = build_hamiltonian(q, {1, 1, 1}, {1, 1, 1});
    const double e0 = ground_state(h).energy;
    for (int t = 0; t < 10; ++t) {
      const auto psi = apply_circuit(spec, uniform_point(static_cast<Eigen::Index>(spec.param_count), rng));
      EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
      EXPECT_GE(expectation(h, psi), e0 - 1e-10);
    }
  }
}

TEST(Properties, AxisRestrictionIsFirstOrderSinusoid) {
  Rng rng(14);
  for (std::size_t q : {2u, 3u}) {
    for (std::size_t l : {1u, 2u}) {
      const auto spec = build_ansatz(q, l);
      const auto h = ising(q);
      const auto dim = static_cast<Eigen::Index>(spec.param_count);
      for (int t = 0; t < 5; ++t) {
        const Eigen::VectorXd x = uniform_point(dim, rng);
        const Eigen::Index d = std::uniform_int_distribution<Eigen::Index>(0, dim - 1)(rng);
        Eigen::VectorXd theta(64), f(64);
        for (int k = 0; k < 64; ++k) {
          theta[k] = kTwoPi * k / 64.0;
          Eigen::VectorXd y = x;
          y[d] += theta[k];
          f[k] = expectation(h, apply_circuit(spec, y));
        }
        double residual = 0.0;
        fit_sinusoid_lsq(theta, f, &residual);
        EXPECT_LT(residual, 1e-9);
      }
    }
  }
}

TEST(Pauli, ParseAndPhase) {
  const auto p = PauliString::parse("XYZ_", 0.5);
  EXPECT_EQ(p.label(), "XYZI");
  EXPECT_DOUBLE_EQ(p.weight(), 0.5);
  EXPECT_FALSE(p.is_identity());
  EXPECT_TRUE(PauliString::parse("II").is_identity());
  EXPECT_THROW(PauliString::parse("XQ"), std::invalid_argument);
  // Y|0> = i|1>, Y|1> = -i|0>.
  const auto y = PauliString::parse("Y");
  EXPECT_EQ(y.phase(0), cd(0, 1));
  EXPECT_EQ(y.phase(1), cd(0, -1));
}

TEST(DenseMatrix, AgreesWithKroneckerOracle) {
  for (const auto& h : {ising(3), build_hamiltonian(3, {1, 1, 1}, {1, 1, 1}, Boundary::periodic)})
    EXPECT_LT((dense_matrix(h) - dense_oracle(h)).cwiseAbs().maxCoeff(), 1e-14);
}
