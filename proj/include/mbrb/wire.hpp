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

// Logical-level simulation of single-qubit MBQC on a linear cluster wire.
//
// Measuring one site at angle theta with outcome m teleports X^m H Z_theta
// onto the logical qubit. Physical imperfections enter only as a logical
// channel after each step or after each gate block, and as a bias on the
// outcome distribution.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mbrb/channel.hpp"
#include "mbrb/gatesets.hpp"

namespace mbrb {

class CounterRng;

enum class NoiseKind {
  none,
  depolarizing,
  dephasing,
  amplitude_damping,
  overrotation,
  composite,
};

enum class NoisePlacement { after_each_step, after_each_block };

std::string to_string(NoiseKind kind);
std::string to_string(NoisePlacement placement);
NoiseKind parse_noise_kind(const std::string& s);
NoisePlacement parse_noise_placement(const std::string& s);

/// Scales the error strength by
///   1 + angle_gain * mean(cos theta_k) + outcome_gain * mean(2 m_k - 1)
/// over the steps the channel covers.
struct NoiseDependence {
  double angle_gain = 0.0;
  double outcome_gain = 0.0;

  bool active() const { return angle_gain != 0.0 || outcome_gain != 0.0; }
  friend bool operator==(const NoiseDependence&, const NoiseDependence&) = default;
};

/// Per-step (or per-block) logical noise.
///
/// `strength` is an error magnitude for every kind: 1 - p for depolarizing,
/// the flip probability for dephasing, gamma for amplitude damping and the
/// extra Z rotation (radians) for overrotation. Composite models apply their
/// components in order and ignore their own strength.
struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  double strength = 0.0;
  std::vector<NoiseModel> components;
  NoiseDependence dependence;
  NoisePlacement placement = NoisePlacement::after_each_block;

  static NoiseModel none() { return {}; }
  /// Depolarizing channel with PTM diag(1, p, p, p).
  static NoiseModel depolarizing(double p,
                                 NoisePlacement placement = NoisePlacement::after_each_block);
  static NoiseModel dephasing(double lambda,
                              NoisePlacement placement = NoisePlacement::after_each_block);
  static NoiseModel amplitude_damping(double gamma,
                                      NoisePlacement placement = NoisePlacement::after_each_block);
  static NoiseModel overrotation(double epsilon,
                                 NoisePlacement placement = NoisePlacement::after_each_block);
  static NoiseModel composite(std::vector<NoiseModel> parts,
                              NoisePlacement placement = NoisePlacement::after_each_block);

  bool is_none() const;
  /// True when the channel depends on angles or outcomes anywhere in the tree.
  bool depends_on_context() const;
  /// Throws InvalidArgument on negative or non-finite strengths, or
  /// probability-valued strengths above one.
  void validate() const;

  /// Channel for a step or block that measured `angles` with physical
  /// outcomes `outcomes`; empty spans mean no dependence.
  Channel realize(std::span<const double> angles = {},
                  std::span<const int> outcomes = {}) const;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

/// Outcome 1 occurs with probability 1/2 + bias.
struct InstrumentConfig {
  double bias = 0.0;
  bool inject_randomness = false;

  void validate() const;
  friend bool operator==(const InstrumentConfig&, const InstrumentConfig&) = default;
};

/// Logical qubit plus the classical record of one wire execution.
struct WireRun {
  State state = State::plus();
  /// Effective outcomes m'_k (after any injected flip).
  std::vector<int> outcomes;
  /// Injected coins c_k; empty when injection is off.
  std::vector<int> injected;
  /// Accumulated byproduct X^x Z^z over Clifford blocks.
  PauliFrame pauli_frame;
  /// Product of the ideal step unitaries actually realized.
  Unitary2 realized;

  static WireRun start(const State& input) { return WireRun{input, {}, {}, {}, {}}; }
};

/// Precomputed channels for one measurement angle.
class StepKernel {
 public:
  StepKernel(double theta, const NoiseModel& noise);

  double theta() const { return theta_; }
  const Unitary2& unitary(int m) const { return unitary_[m]; }
  const Channel& gate(int m) const { return gate_[m]; }
  /// Step noise keyed by the physical outcome; identity under block placement.
  const Channel& noise(int physical_m) const { return noise_[physical_m]; }

 private:
  double theta_;
  std::array<Unitary2, 2> unitary_;
  std::array<Channel, 2> gate_;
  std::array<Channel, 2> noise_;
};

/// Precomputed steps of a block plus its block-level noise.
class BlockKernel {
 public:
  BlockKernel(std::span<const double> angles, const NoiseModel& noise);

  std::size_t size() const { return steps_.size(); }
  const StepKernel& step(std::size_t k) const { return steps_[k]; }
  std::span<const double> angles() const { return angles_; }
  bool clifford() const { return clifford_; }
  /// Block noise for the given physical outcomes (identity under step
  /// placement).
  Channel block_noise(std::span<const int> physical_outcomes) const;

 private:
  std::vector<double> angles_;
  std::vector<StepKernel> steps_;
  NoiseModel noise_;
  Channel fixed_noise_;
  bool outcome_dependent_ = false;
  bool clifford_ = false;
};

/// Physical outcome bits of the last call, before injection.
struct StepOutcome {
  int effective = 0;
  int physical = 0;
};

/// One measurement: draws m with P(1) = 1/2 + bias, flips it with a fair coin
/// when injecting, applies X^{m'} H Z_theta and (under step placement) the
/// noise channel for the physical outcome. Returns the effective outcome.
int measure_step(WireRun& run, double theta, const NoiseModel& noise,
                 const InstrumentConfig& instrument, CounterRng& rng);
StepOutcome measure_step(WireRun& run, const StepKernel& step,
                         const InstrumentConfig& instrument, CounterRng& rng);

/// q measurement steps, then block noise under block placement. Three-step
/// Clifford-angle blocks also advance the Pauli frame. Returns the q
/// effective outcomes. Throws InvalidArgument for an empty block.
std::vector<int> run_gate_block(WireRun& run, std::span<const double> angles,
                                const NoiseModel& noise, const InstrumentConfig& instrument,
                                CounterRng& rng);
std::vector<int> run_gate_block(WireRun& run, const BlockKernel& block,
                                const InstrumentConfig& instrument, CounterRng& rng);

/// New frame after a Clifford block with quarter turns n and outcomes m:
/// X^b1 Z^b2 (C frame C^dagger), with C the block's zero-outcome Clifford.
PauliFrame update_pauli_frame(PauliFrame frame, const QuarterTurns& n, const Outcomes3& m);
/// Radian overload; throws InvalidArgument for non-Clifford angles.
PauliFrame update_pauli_frame(PauliFrame frame, const Angles3& angles, const Outcomes3& m);

/// Probability that the final X measurement reports |+>: apply noise_inv,
/// rotate by `basis`, then evaluate `effect`.
double survival_probability(const WireRun& run, const Unitary2& basis,
                            const NoiseModel& noise_inv,
                            const Effect& effect = Effect::projector_plus());
/// Samples the final measurement; 1 means survival.
int final_measurement(const WireRun& run, const Unitary2& basis, const NoiseModel& noise_inv,
                      CounterRng& rng, const Effect& effect = Effect::projector_plus());

}  // namespace mbrb
