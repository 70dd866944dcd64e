// Copyright 2026 The mbrb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "mbrb/channel.hpp"
#include "mbrb/error.hpp"
#include "mbrb/gatesets.hpp"
#include "mbrb/rng.hpp"
#include "oracles.hpp"

namespace mbrb {
namespace {

constexpr double kPi = std::numbers::pi;

Matrix4 diag4(double a, double b, double c, double d) {
  return Eigen::Vector4d(a, b, c, d).asDiagonal().toDenseMatrix();
}

Channel random_channel(std::uint64_t seed) {
  CounterRng rng(seed);
  const auto kraus = random_kraus(rng);
  return channel_from_kraus(kraus);
}

// Haar average of <psi| E(|psi><psi|) |psi> over pure states, sampled as
// uniform points on the Bloch sphere.
double monte_carlo_fidelity(std::span<const Matrix2c> kraus, const Matrix2c& ideal, int samples,
                            std::uint64_t seed) {
  CounterRng rng(seed);
  double total = 0.0;
  for (int k = 0; k < samples; ++k) {
    Eigen::Vector3d n(rng.normal(), rng.normal(), rng.normal());
    n.normalize();
    const Eigen::Vector2cd psi = oracle::ket_from_bloch(n.x(), n.y(), n.z());
    const Eigen::Vector2cd target = ideal * psi;
    const Matrix2c rho = psi * psi.adjoint();
    const Matrix2c out = oracle::apply_kraus(kraus, rho);
    total += (target.adjoint() * out * target)(0, 0).real();
  }
  return total / samples;
}

TEST(ZRotation, Examples) {
  EXPECT_TRUE(z_rotation(0.0).equivalent(Unitary2::identity()));
  EXPECT_NEAR(std::abs(z_rotation(0.0)(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_TRUE(z_rotation(kPi / 2).equivalent(Unitary2::phase()));
  EXPECT_TRUE(z_rotation(kPi).equivalent(Unitary2::pauli_z()));
  const Unitary2 u = z_rotation(0.7);
  EXPECT_NEAR(std::abs(u(0, 0) - std::exp(Complex(0, -0.35))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u(1, 1) - std::exp(Complex(0, 0.35))), 0.0, 1e-15);
  EXPECT_EQ(u(0, 1), Complex(0.0));
}

TEST(ZRotation, RejectsNonFinite) {
  EXPECT_THROW(z_rotation(std::numeric_limits<double>::quiet_NaN()), InvalidArgument);
  EXPECT_THROW(z_rotation(std::numeric_limits<double>::infinity()), InvalidArgument);
}

TEST(Unitary2, RejectsNonUnitary) {
  Matrix2c m;
  m << 1, 0, 0, 1.001;
  EXPECT_THROW(Unitary2{m}, InvalidArgument);
}

TEST(Unitary2, EqualityIgnoresGlobalPhase) {
  CounterRng rng(11);
  for (int k = 0; k < 50; ++k) {
    const Unitary2 u = random_unitary(rng);
    const Unitary2 v(std::exp(Complex(0, 2.0 * kPi * rng.uniform())) * u.matrix());
    EXPECT_TRUE(u == v);
    EXPECT_LT(u.max_deviation(v), 1e-12);
    EXPECT_FALSE(u == u * Unitary2::pauli_x());
  }
}

TEST(ChannelFromUnitary, Examples) {
  EXPECT_LT((channel_from_unitary(Unitary2::identity()).ptm() - Matrix4::Identity()).norm(), 1e-15);
  EXPECT_LT((channel_from_unitary(Unitary2::pauli_x()).ptm() - diag4(1, 1, -1, -1)).norm(), 1e-15);
}

TEST(ChannelFromUnitary, MatchesTraceFormulaAndIgnoresPhase) {
  CounterRng rng(12);
  for (int k = 0; k < 100; ++k) {
    const Unitary2 u = random_unitary(rng);
    const Matrix2c m = u.matrix();
    const Matrix4 expected =
        oracle::ptm_of([&](const Matrix2c& x) -> Matrix2c { return m * x * m.adjoint(); });
    const Channel c = channel_from_unitary(u);
    EXPECT_LT((c.ptm() - expected).cwiseAbs().maxCoeff(), 1e-12);
    const Unitary2 shifted(std::exp(Complex(0, 1.234)) * m);
    EXPECT_LT((channel_from_unitary(shifted).ptm() - c.ptm()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(ChannelFromUnitary, PropertyOrthogonalBlockAndCptp) {
  CounterRng rng(13);
  for (int k = 0; k < 200; ++k) {
    const Channel c = channel_from_unitary(random_unitary(rng));
    const Eigen::Matrix3d block = c.ptm().bottomRightCorner<3, 3>();
    EXPECT_LT((block.transpose() * block - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(),
              1e-10);
    EXPECT_NEAR(std::abs(block.determinant()), 1.0, 1e-10);
    EXPECT_GE(c.min_choi_eigenvalue(), kChoiFloor);
    EXPECT_NO_THROW(Channel{c.ptm()});
  }
}

TEST(Channel, RejectsNonTracePreserving) {
  Matrix4 m = Matrix4::Identity();
  m(0, 3) = 0.01;
  EXPECT_THROW(Channel{m}, InvalidArgument);
}

TEST(Channel, RejectsNonCompletelyPositive) {
  // Transpose map: positive but not completely positive.
  EXPECT_THROW(Channel{diag4(1, 1, -1, 1)}, InvalidArgument);
  EXPECT_THROW(Channel{diag4(1, 1.1, 1.1, 1.1)}, InvalidArgument);
}

TEST(Channel, ChoiOfIdentityIsMaximallyEntangledProjector) {
  const Eigen::Matrix4cd j = Channel::identity().choi();
  EXPECT_NEAR(j.trace().real(), 1.0, 1e-14);
  EXPECT_NEAR(Channel::identity().min_choi_eigenvalue(), 0.0, 1e-14);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(j);
  EXPECT_NEAR(es.eigenvalues().maxCoeff(), 1.0, 1e-14);
}

TEST(Compose, Examples) {
  const Channel c = random_channel(21);
  EXPECT_LT((compose(Channel::identity(), c).ptm() - c.ptm()).norm(), 1e-15);
  const Channel x = channel_from_unitary(Unitary2::pauli_x());
  EXPECT_LT((compose(x, x).ptm() - Matrix4::Identity()).norm(), 1e-15);
  EXPECT_LT((compose(depolarizing(0.9), depolarizing(0.8)).ptm() - depolarizing(0.72).ptm()).norm(),
            1e-15);
}

TEST(Compose, AppliesFirstThenSecond) {
  const Channel a = amplitude_damping(0.3);
  const Channel h = channel_from_unitary(Unitary2::hadamard());
  const State s = State::from_bloch(0.2, -0.4, 0.5);
  const State lhs = apply(compose(h, a), s);
  const State rhs = apply(h, apply(a, s));
  EXPECT_LT((lhs.coeffs() - rhs.coeffs()).norm(), 1e-15);
  EXPECT_GT((apply(compose(a, h), s).coeffs() - lhs.coeffs()).norm(), 1e-3);
}

TEST(Depolarizing, Examples) {
  EXPECT_LT((depolarizing(1.0).ptm() - Matrix4::Identity()).norm(), 1e-15);
  EXPECT_LT((depolarizing(0.0).ptm() - diag4(1, 0, 0, 0)).norm(), 1e-15);
  EXPECT_LT((depolarizing(0.37).ptm() - diag4(1, 0.37, 0.37, 0.37)).norm(), 1e-15);
  for (double p : {0.0, 0.3, 0.96, 1.0}) {
    EXPECT_NEAR(avg_gate_fidelity(depolarizing(p), Unitary2::identity()), (1 + p) / 2, 1e-15);
  }
}

TEST(Depolarizing, RejectsOutOfRange) {
  EXPECT_THROW(depolarizing(1.0 + 1e-9), InvalidArgument);
  EXPECT_THROW(depolarizing(-1e-9), InvalidArgument);
}

TEST(OtherChannels, MatchKrausDefinitions) {
  const double g = 0.23;
  Matrix2c k0, k1;
  k0 << 1, 0, 0, std::sqrt(1 - g);
  k1 << 0, std::sqrt(g), 0, 0;
  const std::vector<Matrix2c> ad{k0, k1};
  const Matrix4 expected = oracle::ptm_of(
      [&](const Matrix2c& x) -> Matrix2c { return oracle::apply_kraus(ad, x); });
  EXPECT_LT((amplitude_damping(g).ptm() - expected).cwiseAbs().maxCoeff(), 1e-14);

  const double l = 0.17;
  const std::vector<Matrix2c> dp{std::sqrt(1 - l) * Matrix2c::Identity(),
                                 std::sqrt(l) * oracle::pauli_z()};
  const Matrix4 expected_dp = oracle::ptm_of(
      [&](const Matrix2c& x) -> Matrix2c { return oracle::apply_kraus(dp, x); });
  EXPECT_LT((dephasing(l).ptm() - expected_dp).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ChannelFromKraus, RandomChannelsAreCptp) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CounterRng rng(seed);
    const auto kraus = random_kraus(rng);
    Matrix2c sum = Matrix2c::Zero();
    for (const auto& k : kraus) sum += k.adjoint() * k;
    EXPECT_LT((sum - Matrix2c::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    const Channel c = channel_from_kraus(kraus);
    EXPECT_GE(c.min_choi_eigenvalue(), kChoiFloor);
    const Matrix4 expected = oracle::ptm_of(
        [&](const Matrix2c& x) -> Matrix2c { return oracle::apply_kraus(kraus, x); });
    EXPECT_LT((c.ptm() - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(AvgGateFidelity, Examples) {
  EXPECT_NEAR(avg_gate_fidelity(Channel::identity(), Unitary2::identity()), 1.0, 1e-15);
  const Channel h = channel_from_unitary(Unitary2::hadamard());
  EXPECT_NEAR(avg_gate_fidelity(h, Unitary2::hadamard()), 1.0, 1e-15);
  // F_pro(X, I) = 0, so F = 1/3.
  EXPECT_NEAR(avg_gate_fidelity(channel_from_unitary(Unitary2::pauli_x()), Unitary2::identity()),
              1.0 / 3.0, 1e-15);
}

TEST(AvgGateFidelity, AgreesWithHaarMonteCarlo) {
  for (std::uint64_t seed : {31u, 32u, 33u}) {
    CounterRng rng(seed);
    const auto kraus = random_kraus(rng);
    const Channel e = channel_from_kraus(kraus);
    const double mc = monte_carlo_fidelity(kraus, Matrix2c::Identity(), 100000, seed + 1000);
    EXPECT_NEAR(avg_gate_fidelity(e, Unitary2::identity()), mc, 1e-3);
  }
  // Non-identity target: noisy Hadamard against H.
  const Matrix2c h = Unitary2::hadamard().matrix();
  const double g = 0.2;
  Matrix2c k0, k1;
  k0 << 1, 0, 0, std::sqrt(1 - g);
  k1 << 0, std::sqrt(g), 0, 0;
  const std::vector<Matrix2c> kraus{k0 * h, k1 * h};
  const double mc = monte_carlo_fidelity(kraus, h, 100000, 77);
  EXPECT_NEAR(avg_gate_fidelity(channel_from_kraus(kraus), Unitary2::hadamard()), mc, 1e-3);
}

TEST(Twirl, DepolarizingIsInvariant) {
  CounterRng rng(41);
  std::vector<Unitary2> set;
  for (int k = 0; k < 7; ++k) set.push_back(random_unitary(rng));
  EXPECT_LT((twirl(depolarizing(0.81), set).ptm() - depolarizing(0.81).ptm()).cwiseAbs().maxCoeff(),
            1e-14);
}

TEST(Twirl, RejectsEmptySet) {
  EXPECT_THROW(twirl(Channel::identity(), std::vector<Unitary2>{}), InvalidArgument);
}

TEST(Twirl, CliffordTwirlIsDepolarizingWithSameFidelity) {
  const auto cliffords = clifford_unitaries();
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const Channel e = random_channel(seed);
    const Channel t = twirl(e, cliffords);
    const double p = t.depolarizing_parameter();
    EXPECT_LT((t.ptm() - diag4(1, p, p, p)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR((1 + p) / 2, avg_gate_fidelity(e, Unitary2::identity()), 1e-12);
  }
}

TEST(Twirl, AmplitudeDampingMatchesDirectSummation) {
  const double g = 0.1;
  Matrix2c k0, k1;
  k0 << 1, 0, 0, std::sqrt(1 - g);
  k1 << 0, std::sqrt(g), 0, 0;
  const std::vector<Matrix2c> ad{k0, k1};
  const auto cliffords = clifford_unitaries();
  const Matrix4 expected = oracle::ptm_of([&](const Matrix2c& x) -> Matrix2c {
    Matrix2c sum = Matrix2c::Zero();
    for (const auto& u : cliffords) {
      const Matrix2c m = u.matrix();
      sum += m.adjoint() * oracle::apply_kraus(ad, m * x * m.adjoint()) * m;
    }
    return sum / static_cast<double>(cliffords.size());
  });
  const Channel t = twirl(amplitude_damping(g), cliffords);
  EXPECT_LT((t.ptm() - expected).cwiseAbs().maxCoeff(), 1e-12);
  const double p = t.depolarizing_parameter();
  EXPECT_LT((t.ptm() - diag4(1, p, p, p)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Twirl, PropertyIdempotentAndFidelityPreserving) {
  const auto cliffords = clifford_unitaries();
  for (std::uint64_t seed = 200; seed < 230; ++seed) {
    const Channel e = random_channel(seed);
    const Channel once = twirl(e, cliffords);
    EXPECT_LT((twirl(once, cliffords).ptm() - once.ptm()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(avg_gate_fidelity(once, Unitary2::identity()),
                avg_gate_fidelity(e, Unitary2::identity()), 1e-10);
  }
}

TEST(Depolarizing, PropertyCommutesWithUnitaries) {
  CounterRng rng(51);
  const Channel d = depolarizing(0.7);
  for (int k = 0; k < 100; ++k) {
    const Channel u = channel_from_unitary(random_unitary(rng));
    EXPECT_LT((compose(u, d).ptm() - compose(d, u).ptm()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(FramePotential, Examples) {
  const auto paulis = pauli_group();
  EXPECT_NEAR(frame_potential(paulis, 1), 1.0, 1e-12);
  EXPECT_GT(frame_potential(paulis, 2), 2.0 + 1e-3);
  EXPECT_NEAR(frame_potential(clifford_unitaries(), 2), 2.0, 1e-10);
  EXPECT_NEAR(frame_potential(clifford_unitaries(), 1), 1.0, 1e-10);
  EXPECT_THROW(frame_potential(paulis, 3), InvalidArgument);
  EXPECT_THROW(frame_potential(std::vector<Unitary2>{}, 2), InvalidArgument);
}

TEST(FramePotential, HaarReferenceValues) {
  // E|tr(U^dagger V)|^{2t} over independent Haar unitaries is 1 (t = 1)
  // and 2 (t = 2) for d = 2.
  CounterRng rng(61);
  const int n = 100000;
  double m1 = 0.0, m2 = 0.0, m2sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const Unitary2 u = random_unitary(rng);
    const Unitary2 v = random_unitary(rng);
    const double a = std::norm((u.matrix().adjoint() * v.matrix()).trace());
    m1 += a;
    m2 += a * a;
    m2sq += a * a * a * a;
  }
  m1 /= n;
  m2 /= n;
  const double se2 = std::sqrt((m2sq / n - m2 * m2) / n);
  EXPECT_NEAR(m1, 1.0, 0.02);
  EXPECT_NEAR(m2, 2.0, 4 * se2);
}

TEST(StateAndMeasure, Examples) {
  const Effect plus = Effect::projector_plus();
  EXPECT_NEAR(measure(plus, State::plus()), 1.0, 1e-15);
  EXPECT_NEAR(measure(plus, State::maximally_mixed()), 0.5, 1e-15);
  for (double p : {0.0, 0.5, 0.9}) {
    EXPECT_NEAR(measure(plus, apply(depolarizing(p), State::plus())), (1 + p) / 2, 1e-15);
  }
}

TEST(StateAndMeasure, Validation) {
  EXPECT_THROW(State::from_bloch(1.0, 0.1, 0.0), InvalidArgument);
  EXPECT_NO_THROW(State::from_bloch(1.0 + 1e-13, 0.0, 0.0));
  Matrix2c big;
  big << 1.1, 0, 0, 0;
  EXPECT_THROW(Effect{big}, InvalidArgument);
  Matrix2c non_hermitian;
  non_hermitian << 0.5, 0.1, 0, 0.5;
  EXPECT_THROW(Effect{non_hermitian}, InvalidArgument);
}

TEST(StateAndMeasure, RotateAgreesWithUnitaryChannel) {
  CounterRng rng(71);
  for (int k = 0; k < 50; ++k) {
    const Unitary2 u = random_unitary(rng);
    const State s = State::from_bloch(0.3, -0.5, 0.6);
    EXPECT_LT((rotate(u, s).coeffs() - apply(channel_from_unitary(u), s).coeffs()).norm(), 1e-13);
    const Matrix2c rho = u.matrix() * s.density() * u.matrix().adjoint();
    EXPECT_LT((rotate(u, s).density() - rho).cwiseAbs().maxCoeff(), 1e-13);
  }
}

}  // namespace
}  // namespace mbrb
