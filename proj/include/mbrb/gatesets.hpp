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

// The two benchmarking gate sets realizable on a linear cluster wire: the
// 24-element single-qubit Clifford group (three Clifford-angle measurements
// per element) and the 32-element derandomized 2-design (five fixed
// measurements per element, indexed by the outcome bits).

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mbrb/channel.hpp"

namespace mbrb {

using QuarterTurns = std::array<int, 3>;
using Angles3 = std::array<double, 3>;
using Outcomes3 = std::array<int, 3>;
using Outcomes5 = std::array<int, 5>;

/// Pauli X^x Z^z, phases dropped.
struct PauliFrame {
  int x = 0;
  int z = 0;

  Unitary2 unitary() const;
  /// Throws InvalidArgument if `u` is not a Pauli up to phase.
  static PauliFrame from_unitary(const Unitary2& u);

  friend PauliFrame operator*(PauliFrame a, PauliFrame b) {
    return {a.x ^ b.x, a.z ^ b.z};
  }
  friend bool operator==(PauliFrame, PauliFrame) = default;
};

/// X^m H Z_theta: the gate teleported by measuring one wire site at angle
/// theta with outcome m.
Unitary2 measurement_unitary(double theta, int m);

/// Angle as a multiple of pi/2, reduced mod 4. Throws InvalidArgument when
/// the angle is not such a multiple (within 1e-9 quarter turns).
int quarter_turns(double angle);

/// Product of generators read left to right as a matrix product, e.g.
/// "PH" = P * H. The empty word and "I" are the identity.
Unitary2 word_unitary(std::string_view word);

/// Display form of a generator word: "PPPHPPH" -> "P3HP2H", "" -> "I".
std::string compact_word(std::string_view word);

struct AngleRow {
  std::string word;
  QuarterTurns turns;
};

/// Measurement angles (in quarter turns) that implement each Clifford with
/// all outcomes zero, in fixed table order.
std::span<const AngleRow> clifford_angle_table();

struct CliffordElement {
  int index = 0;
  Unitary2 unitary;
  std::string word;
  Angles3 angles{};

  QuarterTurns turns() const;
  std::string name() const { return compact_word(word); }
};

/// All 24 phase-distinct Cliffords, ordered by (word length, word).
const std::vector<CliffordElement>& clifford_group();
std::vector<Unitary2> clifford_unitaries();
/// Position of `u` in clifford_group(); throws NotFound if not a Clifford.
int clifford_index(const Unitary2& u);
/// T1 = {I, P, H, PH, HP, PHP}: one representative per Pauli coset.
const std::vector<CliffordElement>& coset_reps();
std::vector<Unitary2> pauli_group();

/// (H Z_t3)(H Z_t2)(H Z_t1): the first measurement acts first. Throws
/// InvalidArgument for angles that are not multiples of pi/2.
Unitary2 angles_to_clifford(const Angles3& angles);

struct AngleRowCheck {
  std::string word;
  double max_deviation = 0.0;
  bool pass = false;
};

struct AngleTableReport {
  std::vector<AngleRowCheck> rows;
  double max_deviation = 0.0;
  bool all_pass = false;
};

/// Compares every row against its word; never throws on mismatch.
AngleTableReport check_angle_table(std::span<const AngleRow> table);
/// As check_angle_table, but throws VerificationFailure naming the first
/// mismatching row.
AngleTableReport verify_angle_table(
    std::span<const AngleRow> table = clifford_angle_table());

/// Byproduct of a three-measurement Clifford block:
///   b1 = m3 + m2 n3 + m1 (n2 n3 + 1),  b2 = m2 + m1 n2   (mod 2)
/// so that X^b1 Z^b2 U(n, 0) = U(n, m) up to phase.
PauliFrame byproduct_bits(const QuarterTurns& n, const Outcomes3& m);

struct ByproductReport {
  int combinations = 0;
  int mismatches = 0;
  bool pass() const { return combinations == 512 && mismatches == 0; }
};

/// Checks byproduct_bits against explicit matrix products for all 512
/// (n, m) combinations.
ByproductReport verify_byproducts();

/// Bit k-1 of the index holds m_k.
unsigned outcome_index(const Outcomes5& m);
Outcomes5 outcomes_from_index(unsigned index);

struct DerandomizedDesign {
  double phi1 = 0.0;
  double phi2 = 0.0;
  std::array<double, 5> angles{};
  /// pi rotations A_1..A_5 (index 0..4).
  std::array<Unitary2, 5> a;
  /// Gate for all-zero outcomes.
  Unitary2 q_gate;
  /// elements[outcome_index(m)] = A5^m5 ... A1^m1 Q.
  std::array<Unitary2, 32> elements;

  std::vector<Unitary2> element_list() const {
    return {elements.begin(), elements.end()};
  }
};

/// Design for the fixed pattern (phi1, pi/4, acos(1/sqrt3), pi/4, phi2).
DerandomizedDesign derandomized_design(double phi1 = 0.0, double phi2 = 0.0);
const Unitary2& element_from_outcomes(const DerandomizedDesign& design,
                                      const Outcomes5& m);

/// Closed-form A_1..A_5 and Q for phi1 = phi2 = 0, written out entrywise;
/// used to cross-check derandomized_design().
struct DesignMatrices {
  std::array<Unitary2, 5> a;
  Unitary2 q_gate;
};
DesignMatrices reference_design_matrices();

struct DesignMatrixCheck {
  /// Largest entrywise deviation from the reference, phase aligned.
  double max_deviation = 0.0;
  /// Largest of |U^dagger U - I|, |A - A^dagger| and |tr A| over the A_i.
  double max_property_error = 0.0;
  bool pass = false;
};

/// Compares A_1..A_5 and Q of `design` with reference_design_matrices().
DesignMatrixCheck check_design_matrices(const DerandomizedDesign& design, double tol = 1e-10);

struct DesignCheck {
  double frame_potential = 0.0;
  double max_off_target = 0.0;
  double max_fidelity_gap = 0.0;
  bool pass = false;
};

/// Frame potential at t = 2 plus twirls of `channels` random CPTP maps
/// (fixed seed). Passes iff the frame potential is <= 2 + tol and every
/// twirl is depolarizing to within tol.
DesignCheck check_2design(std::span<const Unitary2> gateset, double tol,
                          int channels = 10, std::uint64_t seed = 0x2de51);
bool verify_2design(std::span<const Unitary2> gateset, double tol);

}  // namespace mbrb
