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

#include "mbrb/gatesets.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <optional>

#include "mbrb/error.hpp"
#include "mbrb/rng.hpp"

namespace mbrb {

namespace {

using namespace std::complex_literals;
constexpr double kPi = std::numbers::pi;
constexpr double kQuarter = kPi / 2.0;

// Gate word, then theta_1..theta_3 in units of pi/2.
const std::vector<AngleRow> kAngleTable = {
    {"", {1, 1, 1}},        {"P", {0, 3, 3}},       {"PP", {1, 3, 3}},
    {"PPP", {0, 1, 1}},     {"H", {0, 0, 0}},       {"PH", {0, 1, 0}},
    {"PPH", {0, 2, 0}},     {"PPPH", {0, 3, 0}},    {"HP", {0, 0, 1}},
    {"PHP", {1, 1, 0}},     {"PPHP", {0, 2, 3}},    {"PPPHP", {1, 3, 0}},
    {"HPP", {2, 0, 0}},     {"PHPP", {0, 3, 2}},    {"PPHPP", {0, 2, 2}},
    {"PPPHPP", {0, 1, 2}},  {"HPPP", {0, 0, 3}},    {"PHPPP", {1, 3, 2}},
    {"PPHPPP", {0, 2, 1}},  {"PPPHPPP", {1, 1, 2}}, {"HPPH", {1, 1, 3}},
    {"PHPPH", {0, 1, 3}},   {"PPHPPH", {1, 3, 1}},  {"PPPHPPH", {0, 3, 1}},
};

Angles3 to_angles(const QuarterTurns& n) {
  return {n[0] * kQuarter, n[1] * kQuarter, n[2] * kQuarter};
}

std::optional<int> find_equivalent(const std::vector<Unitary2>& set, const Unitary2& u) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i].equivalent(u)) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::vector<CliffordElement> build_clifford_group() {
  // Closure over {P, H}; BFS words only serve to enumerate.
  std::vector<Unitary2> found{Unitary2::identity()};
  std::deque<Unitary2> frontier{Unitary2::identity()};
  const std::array<Unitary2, 2> gens{Unitary2::phase(), Unitary2::hadamard()};
  while (!frontier.empty()) {
    const Unitary2 u = frontier.front();
    frontier.pop_front();
    for (const auto& g : gens) {
      const Unitary2 next = u * g;
      if (!find_equivalent(found, next)) {
        found.push_back(next);
        frontier.push_back(next);
      }
    }
  }
  if (found.size() != 24) {
    throw VerificationFailure("clifford-group", "closure over {P, H} did not give 24 elements");
  }

  std::vector<CliffordElement> group;
  group.reserve(found.size());
  for (const auto& u : found) {
    const auto row = std::find_if(kAngleTable.begin(), kAngleTable.end(),
                                  [&](const AngleRow& r) { return word_unitary(r.word).equivalent(u); });
    if (row == kAngleTable.end()) {
      throw VerificationFailure("clifford-group", "element missing from the angle table");
    }
    group.push_back({0, u, row->word, to_angles(row->turns)});
  }
  std::sort(group.begin(), group.end(), [](const auto& a, const auto& b) {
    if (a.word.size() != b.word.size()) return a.word.size() < b.word.size();
    return a.word < b.word;
  });
  for (std::size_t i = 0; i < group.size(); ++i) group[i].index = static_cast<int>(i);
  return group;
}

Matrix2c make2(Complex a, Complex b, Complex c, Complex d) {
  Matrix2c m;
  m << a, b, c, d;
  return m;
}

}  // namespace

Unitary2 PauliFrame::unitary() const {
  Unitary2 u;
  if (x) u = Unitary2::pauli_x();
  if (z) u = u * Unitary2::pauli_z();
  return u;
}

PauliFrame PauliFrame::from_unitary(const Unitary2& u) {
  for (int x = 0; x < 2; ++x) {
    for (int z = 0; z < 2; ++z) {
      const PauliFrame f{x, z};
      if (f.unitary().equivalent(u)) return f;
    }
  }
  throw InvalidArgument("unitary is not a Pauli operator");
}

Unitary2 measurement_unitary(double theta, int m) {
  const Unitary2 hz = Unitary2::hadamard() * z_rotation(theta);
  return m ? Unitary2::pauli_x() * hz : hz;
}

int quarter_turns(double angle) {
  if (!std::isfinite(angle)) throw InvalidArgument("angle must be finite");
  const double q = angle / kQuarter;
  const double r = std::round(q);
  if (std::abs(q - r) > 1e-9) {
    throw InvalidArgument("angle is not a multiple of pi/2");
  }
  const long long n = static_cast<long long>(r) % 4;
  return static_cast<int>(n < 0 ? n + 4 : n);
}

Unitary2 word_unitary(std::string_view word) {
  Unitary2 u;
  if (word == "I") return u;
  for (char c : word) {
    switch (c) {
      case 'P': u = u * Unitary2::phase(); break;
      case 'H': u = u * Unitary2::hadamard(); break;
      default: throw InvalidArgument("generator words use only P and H");
    }
  }
  return u;
}

std::string compact_word(std::string_view word) {
  if (word.empty()) return "I";
  std::string out;
  for (std::size_t i = 0; i < word.size();) {
    std::size_t j = i;
    while (j < word.size() && word[j] == word[i]) ++j;
    out += word[i];
    if (j - i > 1) out += std::to_string(j - i);
    i = j;
  }
  return out;
}

std::span<const AngleRow> clifford_angle_table() { return kAngleTable; }

QuarterTurns CliffordElement::turns() const {
  return {quarter_turns(angles[0]), quarter_turns(angles[1]), quarter_turns(angles[2])};
}

const std::vector<CliffordElement>& clifford_group() {
  static const std::vector<CliffordElement> kGroup = build_clifford_group();
  return kGroup;
}

std::vector<Unitary2> clifford_unitaries() {
  std::vector<Unitary2> out;
  for (const auto& e : clifford_group()) out.push_back(e.unitary);
  return out;
}

int clifford_index(const Unitary2& u) {
  for (const auto& e : clifford_group()) {
    if (e.unitary.equivalent(u)) return e.index;
  }
  throw NotFound("unitary is not a single-qubit Clifford");
}

const std::vector<CliffordElement>& coset_reps() {
  static const std::vector<CliffordElement> kReps = [] {
    std::vector<CliffordElement> reps;
    for (std::string_view w : {"", "P", "H", "PH", "HP", "PHP"}) {
      reps.push_back(clifford_group()[clifford_index(word_unitary(w))]);
    }
    return reps;
  }();
  return kReps;
}

std::vector<Unitary2> pauli_group() {
  return {Unitary2::identity(), Unitary2::pauli_x(), Unitary2::pauli_y(), Unitary2::pauli_z()};
}

Unitary2 angles_to_clifford(const Angles3& angles) {
  Unitary2 u;
  for (double theta : angles) {
    quarter_turns(theta);
    u = measurement_unitary(theta, 0) * u;
  }
  return u;
}

AngleTableReport check_angle_table(std::span<const AngleRow> table) {
  AngleTableReport report;
  report.all_pass = true;
  for (const auto& row : table) {
    const Unitary2 from_angles = angles_to_clifford(to_angles(row.turns));
    const double dev = from_angles.max_deviation(word_unitary(row.word));
    const bool pass = dev < 1e-10;
    report.rows.push_back({row.word, dev, pass});
    report.max_deviation = std::max(report.max_deviation, dev);
    report.all_pass = report.all_pass && pass;
  }
  return report;
}

AngleTableReport verify_angle_table(std::span<const AngleRow> table) {
  AngleTableReport report = check_angle_table(table);
  for (const auto& row : report.rows) {
    if (!row.pass) {
      throw VerificationFailure("angle-table", "angle table row " + compact_word(row.word) +
                                                   " does not implement its gate (deviation " +
                                                   std::to_string(row.max_deviation) + ")");
    }
  }
  return report;
}

PauliFrame byproduct_bits(const QuarterTurns& n, const Outcomes3& m) {
  for (int k = 0; k < 3; ++k) {
    if (n[k] < 0 || n[k] > 3) throw InvalidArgument("quarter turns must lie in 0..3");
    if (m[k] != 0 && m[k] != 1) throw InvalidArgument("outcomes must be bits");
  }
  const int n2 = n[1] & 1;
  const int n3 = n[2] & 1;
  const int b1 = (m[2] + m[1] * n3 + m[0] * (n2 * n3 + 1)) & 1;
  const int b2 = (m[1] + m[0] * n2) & 1;
  return {b1, b2};
}

ByproductReport verify_byproducts() {
  ByproductReport report;
  for (int code = 0; code < 64; ++code) {
    const QuarterTurns n{code & 3, (code >> 2) & 3, (code >> 4) & 3};
    const Angles3 theta = to_angles(n);
    const Unitary2 ideal = angles_to_clifford(theta);
    for (int bits = 0; bits < 8; ++bits) {
      const Outcomes3 m{bits & 1, (bits >> 1) & 1, (bits >> 2) & 1};
      Unitary2 actual;
      for (int k = 0; k < 3; ++k) actual = measurement_unitary(theta[k], m[k]) * actual;
      const PauliFrame b = byproduct_bits(n, m);
      ++report.combinations;
      if (!(b.unitary() * ideal).equivalent(actual)) ++report.mismatches;
    }
  }
  return report;
}

unsigned outcome_index(const Outcomes5& m) {
  unsigned index = 0;
  for (int k = 0; k < 5; ++k) {
    if (m[k] != 0 && m[k] != 1) throw InvalidArgument("outcomes must be bits");
    index |= static_cast<unsigned>(m[k]) << k;
  }
  return index;
}

Outcomes5 outcomes_from_index(unsigned index) {
  if (index >= 32) throw InvalidArgument("outcome index must be below 32");
  Outcomes5 m{};
  for (int k = 0; k < 5; ++k) m[k] = static_cast<int>((index >> k) & 1u);
  return m;
}

DerandomizedDesign derandomized_design(double phi1, double phi2) {
  if (!std::isfinite(phi1) || !std::isfinite(phi2)) {
    throw InvalidArgument("design phases must be finite");
  }
  DerandomizedDesign d;
  d.phi1 = phi1;
  d.phi2 = phi2;
  d.angles = {phi1, kPi / 4.0, std::acos(1.0 / std::sqrt(3.0)), kPi / 4.0, phi2};

  std::array<Unitary2, 5> step;
  for (int k = 0; k < 5; ++k) step[k] = measurement_unitary(d.angles[k], 0);

  // A_i = (G_5 ... G_i) Z (G_5 ... G_i)^dagger with G_k = H Z_{theta_k}.
  Unitary2 tail;
  for (int i = 4; i >= 0; --i) {
    tail = tail * step[i];
    d.a[i] = tail * Unitary2::pauli_z() * tail.adjoint();
  }
  d.q_gate = tail;

  for (unsigned idx = 0; idx < 32; ++idx) {
    Unitary2 u = d.q_gate;
    for (int k = 0; k < 5; ++k) {
      if ((idx >> k) & 1u) u = d.a[k] * u;
    }
    d.elements[idx] = u;
  }
  return d;
}

const Unitary2& element_from_outcomes(const DerandomizedDesign& design, const Outcomes5& m) {
  return design.elements[outcome_index(m)];
}

DesignMatrices reference_design_matrices() {
  const double r3 = std::sqrt(3.0);
  const Complex w = 1.0 + 1i;
  DesignMatrices ref;
  ref.a[0] = Unitary2(make2(1.0 / r3, -w * (r3 + 3i) / 6.0, w * (3.0 + 1i * r3) / 6.0, -1.0 / r3));
  ref.a[1] = Unitary2(make2(1.0 / r3, w / r3, (1.0 - 1i) / r3, -1.0 / r3));
  ref.a[2] = Unitary2(make2(0.0, std::exp(-1i * kPi / 4.0), std::exp(1i * kPi / 4.0), 0.0));
  ref.a[3] = Unitary2::pauli_z();
  ref.a[4] = Unitary2::pauli_x();
  const Unitary2 h = Unitary2::hadamard();
  ref.q_gate = z_rotation(kPi / 4.0) * h * z_rotation(std::acos(1.0 / r3)) * h *
               z_rotation(kPi / 4.0) * h;
  return ref;
}

DesignMatrixCheck check_design_matrices(const DerandomizedDesign& design, double tol) {
  const DesignMatrices ref = reference_design_matrices();
  DesignMatrixCheck check;
  for (std::size_t i = 0; i < 5; ++i) {
    check.max_deviation = std::max(check.max_deviation, ref.a[i].max_deviation(design.a[i]));
    const Matrix2c& m = design.a[i].matrix();
    const double unitarity = (m.adjoint() * m - Matrix2c::Identity()).cwiseAbs().maxCoeff();
    const double hermiticity = (m - m.adjoint()).cwiseAbs().maxCoeff();
    const double trace = std::abs(m.trace());
    check.max_property_error =
        std::max({check.max_property_error, unitarity, hermiticity, trace});
  }
  check.max_deviation = std::max(check.max_deviation, ref.q_gate.max_deviation(design.q_gate));
  check.pass = check.max_deviation < tol && check.max_property_error < tol;
  return check;
}

DesignCheck check_2design(std::span<const Unitary2> gateset, double tol, int channels,
                          std::uint64_t seed) {
  DesignCheck check;
  check.frame_potential = frame_potential(gateset, 2);
  for (int c = 0; c < channels; ++c) {
    CounterRng rng = CounterRng::stream(seed, {static_cast<std::uint64_t>(c)});
    const auto kraus = random_kraus(rng);
    const Channel e = channel_from_kraus(kraus);
    const Channel t = twirl(e, gateset);
    const double p = t.depolarizing_parameter();
    const Matrix4 target = Eigen::Vector4d(1.0, p, p, p).asDiagonal().toDenseMatrix();
    check.max_off_target = std::max(check.max_off_target, (t.ptm() - target).cwiseAbs().maxCoeff());
    check.max_fidelity_gap = std::max(
        check.max_fidelity_gap, std::abs((1.0 + p) / 2.0 - avg_gate_fidelity(e, Unitary2::identity())));
  }
  check.pass = check.frame_potential <= 2.0 + tol && check.max_off_target <= tol &&
               check.max_fidelity_gap <= tol;
  return check;
}

bool verify_2design(std::span<const Unitary2> gateset, double tol) {
  return check_2design(gateset, tol).pass;
}

}  // namespace mbrb
