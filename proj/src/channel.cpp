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

#include "mbrb/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "mbrb/error.hpp"
#include "mbrb/rng.hpp"

namespace mbrb {

namespace {

using namespace std::complex_literals;

const std::array<Matrix2c, 4>& paulis() {
  static const std::array<Matrix2c, 4> kPaulis = [] {
    std::array<Matrix2c, 4> p;
    p[0] << 1, 0, 0, 1;
    p[1] << 0, 1, 1, 0;
    p[2] << 0, -1i, 1i, 0;
    p[3] << 1, 0, 0, -1;
    return p;
  }();
  return kPaulis;
}

Matrix4 ptm_of_map(const auto& map) {
  const auto& s = paulis();
  Matrix4 r;
  for (int j = 0; j < 4; ++j) {
    const Matrix2c image = map(s[j]);
    for (int i = 0; i < 4; ++i) {
      r(i, j) = 0.5 * (s[i] * image).trace().real();
    }
  }
  return r;
}

Eigen::Matrix4cd kron(const Matrix2c& a, const Matrix2c& b) {
  Eigen::Matrix4cd k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return k;
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument(std::string(name) + " must lie in [0, 1], got " +
                          std::to_string(p));
  }
}

}  // namespace

Unitary2::Unitary2(const Matrix2c& m) : m_(m) {
  const Matrix2c gram = m.adjoint() * m - Matrix2c::Identity();
  if (!m.allFinite() || gram.cwiseAbs().maxCoeff() > kUnitarityTol) {
    throw InvalidArgument("matrix is not unitary");
  }
}

Unitary2 Unitary2::pauli_x() { return Unitary2(paulis()[1], Unchecked{}); }
Unitary2 Unitary2::pauli_y() { return Unitary2(paulis()[2], Unchecked{}); }
Unitary2 Unitary2::pauli_z() { return Unitary2(paulis()[3], Unchecked{}); }

Unitary2 Unitary2::hadamard() {
  Matrix2c h;
  h << 1, 1, 1, -1;
  return Unitary2(h / std::sqrt(2.0), Unchecked{});
}

Unitary2 Unitary2::phase() {
  Matrix2c p;
  p << 1, 0, 0, 1i;
  return Unitary2(p, Unchecked{});
}

Unitary2 Unitary2::adjoint() const { return Unitary2(m_.adjoint(), Unchecked{}); }

Unitary2 Unitary2::operator*(const Unitary2& rhs) const {
  return Unitary2(m_ * rhs.m_, Unchecked{});
}

double Unitary2::phase_distance(const Unitary2& other) const {
  return 2.0 - std::abs((m_.adjoint() * other.m_).trace());
}

double Unitary2::max_deviation(const Unitary2& other) const {
  const Complex overlap = (other.m_.adjoint() * m_).trace();
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : 1.0;
  return (m_ - phase * other.m_).cwiseAbs().maxCoeff();
}

bool Unitary2::equivalent(const Unitary2& other, double tol) const {
  return std::abs(phase_distance(other)) <= tol;
}

Unitary2 z_rotation(double theta) {
  if (!std::isfinite(theta)) {
    throw InvalidArgument("rotation angle must be finite");
  }
  Matrix2c m = Matrix2c::Zero();
  m(0, 0) = std::exp(-0.5i * theta);
  m(1, 1) = std::exp(0.5i * theta);
  return Unitary2(m);
}

Channel::Channel(const Matrix4& ptm) : ptm_(ptm) {
  if (!ptm.allFinite()) throw InvalidArgument("channel PTM has non-finite entries");
  const Eigen::RowVector4d tp(1.0, 0.0, 0.0, 0.0);
  if ((ptm.row(0) - tp).cwiseAbs().maxCoeff() > kTraceTol) {
    throw InvalidArgument("channel is not trace preserving");
  }
  if (min_choi_eigenvalue() < kChoiFloor) {
    throw InvalidArgument("channel is not completely positive");
  }
}

Eigen::Matrix4cd Channel::choi() const {
  // J = (1/4) sum_ij R_ij s_j^T (x) s_i, trace one.
  const auto& s = paulis();
  Eigen::Matrix4cd j = Eigen::Matrix4cd::Zero();
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (ptm_(a, b) == 0.0) continue;
      j += 0.25 * ptm_(a, b) * kron(s[b].transpose(), s[a]);
    }
  }
  return j;
}

double Channel::min_choi_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(choi(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double Channel::depolarizing_parameter() const {
  return (ptm_(1, 1) + ptm_(2, 2) + ptm_(3, 3)) / 3.0;
}

Channel channel_from_unitary(const Unitary2& u) {
  const Matrix2c& m = u.matrix();
  return Channel(ptm_of_map([&](const Matrix2c& x) -> Matrix2c {
                   return m * x * m.adjoint();
                 }),
                 Channel::Unchecked{});
}

Channel channel_from_kraus(std::span<const Matrix2c> kraus) {
  Matrix2c sum = Matrix2c::Zero();
  for (const auto& k : kraus) sum += k.adjoint() * k;
  if ((sum - Matrix2c::Identity()).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidArgument("Kraus operators do not sum to the identity");
  }
  Matrix4 r = ptm_of_map([&](const Matrix2c& x) -> Matrix2c {
    Matrix2c out = Matrix2c::Zero();
    for (const auto& k : kraus) out += k * x * k.adjoint();
    return out;
  });
  r.row(0) << 1.0, 0.0, 0.0, 0.0;
  return Channel(r, Channel::Unchecked{});
}

Channel compose(const Channel& second, const Channel& first) {
  return Channel(second.ptm_ * first.ptm_, Channel::Unchecked{});
}

Channel depolarizing(double p) {
  check_probability(p, "depolarizing parameter");
  return Channel(Eigen::Vector4d(1.0, p, p, p).asDiagonal().toDenseMatrix());
}

Channel dephasing(double lambda) {
  check_probability(lambda, "dephasing probability");
  const double c = 1.0 - 2.0 * lambda;
  return Channel(Eigen::Vector4d(1.0, c, c, 1.0).asDiagonal().toDenseMatrix());
}

Channel amplitude_damping(double gamma) {
  check_probability(gamma, "damping rate");
  const double c = std::sqrt(1.0 - gamma);
  Matrix4 r = Matrix4::Zero();
  r(0, 0) = 1.0;
  r(1, 1) = c;
  r(2, 2) = c;
  r(3, 0) = gamma;
  r(3, 3) = 1.0 - gamma;
  return Channel(r);
}

Unitary2 random_unitary(CounterRng& rng) {
  Matrix2c g;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
  Eigen::HouseholderQR<Matrix2c> qr(g);
  Matrix2c q = qr.householderQ();
  const Matrix2c r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 2; ++i) {
    const Complex d = r(i, i);
    q.col(i) *= std::abs(d) > 0.0 ? d / std::abs(d) : 1.0;
  }
  return Unitary2(q);
}

std::vector<Matrix2c> random_kraus(CounterRng& rng, int rank) {
  if (rank < 1) throw InvalidArgument("Kraus rank must be positive");
  const int rows = 2 * rank;
  Eigen::MatrixXcd g(rows, 2);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < 2; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  const Eigen::MatrixXcd v = qr.householderQ() * Eigen::MatrixXcd::Identity(rows, 2);
  std::vector<Matrix2c> kraus(rank);
  for (int k = 0; k < rank; ++k) kraus[k] = v.block<2, 2>(2 * k, 0);
  return kraus;
}

double process_fidelity(const Channel& noisy, const Unitary2& ideal) {
  const Matrix4 r_ideal = channel_from_unitary(ideal).ptm();
  return (r_ideal.transpose() * noisy.ptm()).trace() / 4.0;
}

double avg_gate_fidelity(const Channel& noisy, const Unitary2& ideal) {
  return (2.0 * process_fidelity(noisy, ideal) + 1.0) / 3.0;
}

Channel twirl(const Channel& e, std::span<const Unitary2> gateset) {
  if (gateset.empty()) throw InvalidArgument("twirl over an empty gate set");
  Matrix4 sum = Matrix4::Zero();
  for (const auto& u : gateset) {
    const Matrix4 r = channel_from_unitary(u).ptm();
    // Unitary PTMs are orthogonal, so the adjoint channel is the transpose.
    sum += r.transpose() * e.ptm_ * r;
  }
  return Channel(sum / static_cast<double>(gateset.size()), Channel::Unchecked{});
}

double frame_potential(std::span<const Unitary2> gateset, int t) {
  if (gateset.empty()) throw InvalidArgument("frame potential of an empty set");
  if (t != 1 && t != 2) throw InvalidArgument("frame potential supports t = 1 or 2");
  double sum = 0.0;
  for (const auto& u : gateset) {
    for (const auto& v : gateset) {
      const double overlap = std::norm((u.matrix().adjoint() * v.matrix()).trace());
      sum += t == 1 ? overlap : overlap * overlap;
    }
  }
  const double n = static_cast<double>(gateset.size());
  return sum / (n * n);
}

State::State(const Vector4& coeffs) : coeffs_(coeffs) {
  if (!coeffs.allFinite() || std::abs(coeffs(0) - 1.0) > kTraceTol) {
    throw InvalidArgument("state must have unit trace");
  }
  if (coeffs.tail<3>().norm() > 1.0 + 1e-12) {
    throw InvalidArgument("Bloch vector longer than one");
  }
}

State State::from_bloch(double x, double y, double z) {
  return State(Vector4(1.0, x, y, z));
}

Matrix2c State::density() const {
  const auto& s = paulis();
  Matrix2c rho = Matrix2c::Zero();
  for (int i = 0; i < 4; ++i) rho += 0.5 * coeffs_(i) * s[i];
  return rho;
}

Effect::Effect(const Matrix2c& op) : op_(op) {
  if (!op.allFinite() || (op - op.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidArgument("effect must be Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix2c> solver(op, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-12 ||
      solver.eigenvalues().maxCoeff() > 1.0 + 1e-12) {
    throw InvalidArgument("effect eigenvalues must lie in [0, 1]");
  }
}

Effect Effect::projector_plus() {
  Matrix2c e;
  e << 0.5, 0.5, 0.5, 0.5;
  return Effect(e);
}

State apply(const Channel& c, const State& s) {
  return State(c.ptm() * s.coeffs(), State::Unchecked{});
}

State rotate(const Unitary2& u, const State& s) {
  const auto& p = paulis();
  const Matrix2c rho = u.matrix() * s.density() * u.matrix().adjoint();
  Vector4 out;
  out(0) = 1.0;
  for (int i = 1; i < 4; ++i) out(i) = (p[i] * rho).trace().real();
  return State(out, State::Unchecked{});
}

double measure(const Effect& e, const State& s) {
  const double p = (e.op() * s.density()).trace().real();
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace mbrb
