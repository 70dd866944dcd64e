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

#pragma once

// Single-qubit unitary and channel algebra.
//
// Channels are Pauli-transfer matrices (PTMs) in the basis {I, X, Y, Z}:
// ptm(i, j) = tr(s_i E(s_j)) / 2. States are the matching coefficient vector
// (1, x, y, z) with rho = (I + xX + yY + zZ) / 2, so applying a channel is a
// 4x4 matrix-vector product and composition is a matrix product.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mbrb {

class CounterRng;

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4d;
using Vector4 = Eigen::Vector4d;

inline constexpr double kUnitarityTol = 1e-12;
inline constexpr double kPhaseTol = 1e-10;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kChoiFloor = -1e-10;

/// 2x2 unitary. Comparison is up to global phase.
class Unitary2 {
 public:
  Unitary2() : m_(Matrix2c::Identity()) {}
  /// Throws InvalidArgument unless U^dagger U = I entrywise within 1e-12.
  explicit Unitary2(const Matrix2c& m);

  static Unitary2 identity() { return {}; }
  static Unitary2 pauli_x();
  static Unitary2 pauli_y();
  static Unitary2 pauli_z();
  static Unitary2 hadamard();
  /// diag(1, i).
  static Unitary2 phase();

  const Matrix2c& matrix() const noexcept { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }

  Unitary2 adjoint() const;
  Unitary2 operator*(const Unitary2& rhs) const;

  /// 2 - |tr(U^dagger V)|; zero iff the two agree up to a global phase.
  double phase_distance(const Unitary2& other) const;
  /// Largest entrywise deviation after aligning the global phase of `other`.
  double max_deviation(const Unitary2& other) const;
  bool equivalent(const Unitary2& other, double tol = kPhaseTol) const;

  friend bool operator==(const Unitary2& a, const Unitary2& b) {
    return a.equivalent(b);
  }

 private:
  struct Unchecked {};
  Unitary2(const Matrix2c& m, Unchecked) : m_(m) {}
  Matrix2c m_;
};

/// exp(-i theta Z / 2). Throws InvalidArgument for non-finite theta.
Unitary2 z_rotation(double theta);

/// Single-qubit CPTP map as a real 4x4 PTM.
class Channel {
 public:
  Channel() : ptm_(Matrix4::Identity()) {}
  /// Validates trace preservation (first row (1,0,0,0) within 1e-12) and
  /// complete positivity (min Choi eigenvalue >= -1e-10).
  explicit Channel(const Matrix4& ptm);

  static Channel identity() { return {}; }

  const Matrix4& ptm() const noexcept { return ptm_; }
  /// Normalized Choi matrix (trace 1).
  Eigen::Matrix4cd choi() const;
  double min_choi_eigenvalue() const;
  /// Mean of the diagonal of the {X,Y,Z} block: the depolarizing parameter of
  /// this channel's twirl.
  double depolarizing_parameter() const;

  friend Channel compose(const Channel& second, const Channel& first);
  friend Channel channel_from_unitary(const Unitary2& u);
  friend Channel twirl(const Channel& e, std::span<const Unitary2> gateset);
  friend Channel channel_from_kraus(std::span<const Matrix2c> kraus);

 private:
  struct Unchecked {};
  Channel(const Matrix4& ptm, Unchecked) : ptm_(ptm) {}
  Matrix4 ptm_;
};

Channel channel_from_unitary(const Unitary2& u);
/// Channel with Kraus operators {K}; throws unless sum K^dagger K = I.
Channel channel_from_kraus(std::span<const Matrix2c> kraus);
/// second o first: applying the result equals applying first, then second.
Channel compose(const Channel& second, const Channel& first);

/// rho -> p rho + (1 - p) I/2, p in [0, 1].
Channel depolarizing(double p);
/// rho -> (1 - lambda) rho + lambda Z rho Z, lambda in [0, 1].
Channel dephasing(double lambda);
/// T1 decay towards |0>, gamma in [0, 1].
Channel amplitude_damping(double gamma);

/// Random CPTP map from a Haar-random Stinespring isometry with a 4-level
/// environment (Kraus rank up to 4).
std::vector<Matrix2c> random_kraus(CounterRng& rng, int rank = 4);
/// Haar-random 2x2 unitary.
Unitary2 random_unitary(CounterRng& rng);

/// tr(R_ideal^T R_noisy) / 4.
double process_fidelity(const Channel& noisy, const Unitary2& ideal);
/// Average over pure states of <psi| U^dagger E(psi) U |psi>, via
/// (2 F_pro + 1) / 3.
double avg_gate_fidelity(const Channel& noisy, const Unitary2& ideal);

/// (1/N) sum_r U_r^dagger o E o U_r. Throws InvalidArgument on an empty set.
Channel twirl(const Channel& e, std::span<const Unitary2> gateset);

/// (1/N^2) sum_{U,V} |tr(U^dagger V)|^{2t} for t in {1, 2}. The Haar values
/// are 1 (t = 1) and 2 (t = 2); a set reaches them iff it is a t-design.
double frame_potential(std::span<const Unitary2> gateset, int t);

/// Single-qubit density operator in Pauli coordinates (1, x, y, z).
class State {
 public:
  State() : coeffs_(1.0, 0.0, 0.0, 0.0) {}
  /// Throws InvalidArgument if coeffs(0) != 1 or |bloch| > 1 + 1e-12.
  explicit State(const Vector4& coeffs);

  static State from_bloch(double x, double y, double z);
  static State maximally_mixed() { return {}; }
  static State plus() { return from_bloch(1.0, 0.0, 0.0); }

  const Vector4& coeffs() const noexcept { return coeffs_; }
  Eigen::Vector3d bloch() const { return coeffs_.tail<3>(); }
  Matrix2c density() const;

 private:
  friend State apply(const Channel& c, const State& s);
  friend State rotate(const Unitary2& u, const State& s);
  struct Unchecked {};
  State(const Vector4& coeffs, Unchecked) : coeffs_(coeffs) {}
  Vector4 coeffs_;
};

/// POVM element; eigenvalues must lie in [-1e-12, 1 + 1e-12].
class Effect {
 public:
  explicit Effect(const Matrix2c& op);
  /// |+><+|.
  static Effect projector_plus();

  const Matrix2c& op() const noexcept { return op_; }

 private:
  Matrix2c op_;
};

State apply(const Channel& c, const State& s);
/// U rho U^dagger without building the PTM.
State rotate(const Unitary2& u, const State& s);
/// tr(E rho), clamped to [0, 1].
double measure(const Effect& e, const State& s);

}  // namespace mbrb
