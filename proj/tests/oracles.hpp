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

// Reference computations written directly from matrix definitions, kept
// independent of the library's PTM and twirl code.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using M2 = Eigen::Matrix2cd;
using M4 = Eigen::Matrix4d;

inline const std::array<M2, 4>& paulis() {
  static const std::array<M2, 4> s = [] {
    std::array<M2, 4> p;
    p[0] << 1, 0, 0, 1;
    p[1] << 0, 1, 1, 0;
    p[2] << 0, C(0, -1), C(0, 1), 0;
    p[3] << 1, 0, 0, -1;
    return p;
  }();
  return s;
}

/// R_ij = (1/2) tr(sigma_i f(sigma_j)).
inline M4 ptm_of(const std::function<M2(const M2&)>& f) {
  M4 r;
  for (int j = 0; j < 4; ++j) {
    const M2 out = f(paulis()[j]);
    for (int i = 0; i < 4; ++i) r(i, j) = 0.5 * (paulis()[i] * out).trace().real();
  }
  return r;
}

inline M2 apply_kraus(std::span<const M2> kraus, const M2& rho) {
  M2 out = M2::Zero();
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

inline M2 rz(double theta) {
  M2 m;
  m << std::exp(C(0, -theta / 2)), 0, 0, std::exp(C(0, theta / 2));
  return m;
}

inline M2 hadamard() {
  M2 m;
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

inline M2 pauli_x() { return paulis()[1]; }
inline M2 pauli_z() { return paulis()[3]; }

/// X^m H Z_theta.
inline M2 step(double theta, int m) {
  M2 u = hadamard() * rz(theta);
  return m ? M2(pauli_x() * u) : u;
}

/// True when a = e^{i phi} b for some phi.
inline bool same_up_to_phase(const M2& a, const M2& b, double tol = 1e-10) {
  return std::abs(2.0 - std::abs((a.adjoint() * b).trace())) < tol;
}

/// Pure state with Bloch vector n.
inline Eigen::Vector2cd ket_from_bloch(double x, double y, double z) {
  const double theta = std::acos(std::clamp(z, -1.0, 1.0));
  const double phi = std::atan2(y, x);
  return {C(std::cos(theta / 2), 0), std::exp(C(0, phi)) * std::sin(theta / 2)};
}

}  // namespace oracle
