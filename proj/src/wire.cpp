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

#include "mbrb/wire.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "mbrb/error.hpp"
#include "mbrb/rng.hpp"

namespace mbrb {

namespace {

bool is_probability_kind(NoiseKind kind) {
  return kind == NoiseKind::depolarizing || kind == NoiseKind::dephasing ||
         kind == NoiseKind::amplitude_damping;
}

double dependence_factor(const NoiseDependence& dep, std::span<const double> angles,
                         std::span<const int> outcomes) {
  double factor = 1.0;
  if (dep.angle_gain != 0.0 && !angles.empty()) {
    double sum = 0.0;
    for (double a : angles) sum += std::cos(a);
    factor += dep.angle_gain * sum / static_cast<double>(angles.size());
  }
  if (dep.outcome_gain != 0.0 && !outcomes.empty()) {
    double sum = 0.0;
    for (int m : outcomes) sum += 2.0 * m - 1.0;
    factor += dep.outcome_gain * sum / static_cast<double>(outcomes.size());
  }
  return factor;
}

Channel realize_scaled(const NoiseModel& model, std::span<const double> angles,
                       std::span<const int> outcomes, double scale) {
  const double factor = scale * dependence_factor(model.dependence, angles, outcomes);
  const double e = model.strength * factor;
  const double prob = std::clamp(e, 0.0, 1.0);
  switch (model.kind) {
    case NoiseKind::none:
      return Channel::identity();
    case NoiseKind::depolarizing:
      return depolarizing(1.0 - prob);
    case NoiseKind::dephasing:
      return dephasing(prob);
    case NoiseKind::amplitude_damping:
      return amplitude_damping(prob);
    case NoiseKind::overrotation:
      return channel_from_unitary(z_rotation(e));
    case NoiseKind::composite: {
      Channel total;
      for (const auto& part : model.components) {
        total = compose(realize_scaled(part, angles, outcomes, factor), total);
      }
      return total;
    }
  }
  return Channel::identity();
}

bool depends_on_outcomes(const NoiseModel& model) {
  if (model.dependence.outcome_gain != 0.0) return true;
  return std::any_of(model.components.begin(), model.components.end(), depends_on_outcomes);
}

}  // namespace

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::depolarizing: return "depolarizing";
    case NoiseKind::dephasing: return "dephasing";
    case NoiseKind::amplitude_damping: return "amplitude-damping";
    case NoiseKind::overrotation: return "unitary-overrotation";
    case NoiseKind::composite: return "composite";
  }
  return "none";
}

std::string to_string(NoisePlacement placement) {
  return placement == NoisePlacement::after_each_step ? "after-each-step" : "after-each-block";
}

NoiseKind parse_noise_kind(const std::string& s) {
  for (NoiseKind k : {NoiseKind::none, NoiseKind::depolarizing, NoiseKind::dephasing,
                      NoiseKind::amplitude_damping, NoiseKind::overrotation,
                      NoiseKind::composite}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidArgument("unknown noise kind '" + s + "'");
}

NoisePlacement parse_noise_placement(const std::string& s) {
  if (s == "after-each-step") return NoisePlacement::after_each_step;
  if (s == "after-each-block") return NoisePlacement::after_each_block;
  throw InvalidArgument("unknown noise placement '" + s + "'");
}

NoiseModel NoiseModel::depolarizing(double p, NoisePlacement placement) {
  NoiseModel m{NoiseKind::depolarizing, 1.0 - p, {}, {}, placement};
  m.validate();
  return m;
}

NoiseModel NoiseModel::dephasing(double lambda, NoisePlacement placement) {
  NoiseModel m{NoiseKind::dephasing, lambda, {}, {}, placement};
  m.validate();
  return m;
}

NoiseModel NoiseModel::amplitude_damping(double gamma, NoisePlacement placement) {
  NoiseModel m{NoiseKind::amplitude_damping, gamma, {}, {}, placement};
  m.validate();
  return m;
}

NoiseModel NoiseModel::overrotation(double epsilon, NoisePlacement placement) {
  NoiseModel m{NoiseKind::overrotation, epsilon, {}, {}, placement};
  m.validate();
  return m;
}

NoiseModel NoiseModel::composite(std::vector<NoiseModel> parts, NoisePlacement placement) {
  NoiseModel m{NoiseKind::composite, 0.0, std::move(parts), {}, placement};
  m.validate();
  return m;
}

bool NoiseModel::is_none() const {
  if (kind == NoiseKind::none) return true;
  if (kind == NoiseKind::composite) {
    return std::all_of(components.begin(), components.end(),
                       [](const NoiseModel& c) { return c.is_none(); });
  }
  return strength == 0.0;
}

bool NoiseModel::depends_on_context() const {
  if (dependence.active()) return true;
  return std::any_of(components.begin(), components.end(),
                     [](const NoiseModel& c) { return c.depends_on_context(); });
}

void NoiseModel::validate() const {
  if (!std::isfinite(strength) || !std::isfinite(dependence.angle_gain) ||
      !std::isfinite(dependence.outcome_gain)) {
    throw InvalidArgument("noise parameters must be finite");
  }
  if (is_probability_kind(kind) && (strength < 0.0 || strength > 1.0)) {
    throw InvalidArgument(to_string(kind) + " strength must lie in [0, 1]");
  }
  if (kind != NoiseKind::composite && !components.empty()) {
    throw InvalidArgument("only composite noise may have components");
  }
  for (const auto& c : components) c.validate();
}

Channel NoiseModel::realize(std::span<const double> angles, std::span<const int> outcomes) const {
  return realize_scaled(*this, angles, outcomes, 1.0);
}

void InstrumentConfig::validate() const {
  if (!(bias >= -0.5 && bias <= 0.5)) {
    throw InvalidArgument("instrument bias must lie in [-1/2, 1/2]");
  }
}

StepKernel::StepKernel(double theta, const NoiseModel& noise) : theta_(theta) {
  for (int m = 0; m < 2; ++m) {
    unitary_[m] = measurement_unitary(theta, m);
    gate_[m] = channel_from_unitary(unitary_[m]);
    if (noise.placement == NoisePlacement::after_each_step) {
      const double angle[1] = {theta};
      const int outcome[1] = {m};
      noise_[m] = noise.realize(angle, outcome);
    }
  }
}

BlockKernel::BlockKernel(std::span<const double> angles, const NoiseModel& noise)
    : angles_(angles.begin(), angles.end()), noise_(noise) {
  if (angles.empty()) throw InvalidArgument("a gate block needs at least one measurement");
  for (double theta : angles) steps_.emplace_back(theta, noise);
  if (noise.placement == NoisePlacement::after_each_block) {
    outcome_dependent_ = depends_on_outcomes(noise);
    if (!outcome_dependent_) fixed_noise_ = noise.realize(angles_);
  }
  clifford_ = angles.size() == 3 && std::all_of(angles.begin(), angles.end(), [](double a) {
                const double q = a / (std::numbers::pi / 2.0);
                return std::isfinite(q) && std::abs(q - std::round(q)) <= 1e-9;
              });
}

Channel BlockKernel::block_noise(std::span<const int> physical_outcomes) const {
  if (noise_.placement != NoisePlacement::after_each_block) return Channel::identity();
  if (!outcome_dependent_) return fixed_noise_;
  return noise_.realize(angles_, physical_outcomes);
}

StepOutcome measure_step(WireRun& run, const StepKernel& step, const InstrumentConfig& instrument,
                         CounterRng& rng) {
  StepOutcome out;
  out.physical = rng.bernoulli(0.5 + instrument.bias);
  int coin = 0;
  if (instrument.inject_randomness) {
    coin = rng.bernoulli(0.5);
    run.injected.push_back(coin);
  }
  out.effective = out.physical ^ coin;
  run.state = apply(step.noise(out.physical), apply(step.gate(out.effective), run.state));
  run.realized = step.unitary(out.effective) * run.realized;
  run.outcomes.push_back(out.effective);
  return out;
}

int measure_step(WireRun& run, double theta, const NoiseModel& noise,
                 const InstrumentConfig& instrument, CounterRng& rng) {
  instrument.validate();
  return measure_step(run, StepKernel(theta, noise), instrument, rng).effective;
}

std::vector<int> run_gate_block(WireRun& run, const BlockKernel& block,
                                const InstrumentConfig& instrument, CounterRng& rng) {
  std::vector<int> effective(block.size());
  std::vector<int> physical(block.size());
  for (std::size_t k = 0; k < block.size(); ++k) {
    const StepOutcome o = measure_step(run, block.step(k), instrument, rng);
    effective[k] = o.effective;
    physical[k] = o.physical;
  }
  run.state = apply(block.block_noise(physical), run.state);
  if (block.clifford()) {
    const auto a = block.angles();
    run.pauli_frame = update_pauli_frame(run.pauli_frame, Angles3{a[0], a[1], a[2]},
                                         Outcomes3{effective[0], effective[1], effective[2]});
  }
  return effective;
}

std::vector<int> run_gate_block(WireRun& run, std::span<const double> angles,
                                const NoiseModel& noise, const InstrumentConfig& instrument,
                                CounterRng& rng) {
  instrument.validate();
  return run_gate_block(run, BlockKernel(angles, noise), instrument, rng);
}

PauliFrame update_pauli_frame(PauliFrame frame, const QuarterTurns& n, const Outcomes3& m) {
  const double q = std::numbers::pi / 2.0;
  const Unitary2 c = angles_to_clifford({n[0] * q, n[1] * q, n[2] * q});
  const PauliFrame carried = PauliFrame::from_unitary(c * frame.unitary() * c.adjoint());
  return byproduct_bits(n, m) * carried;
}

PauliFrame update_pauli_frame(PauliFrame frame, const Angles3& angles, const Outcomes3& m) {
  const QuarterTurns n{quarter_turns(angles[0]), quarter_turns(angles[1]),
                       quarter_turns(angles[2])};
  return update_pauli_frame(frame, n, m);
}

double survival_probability(const WireRun& run, const Unitary2& basis, const NoiseModel& noise_inv,
                            const Effect& effect) {
  const State noisy = noise_inv.is_none() ? run.state : apply(noise_inv.realize(), run.state);
  return measure(effect, rotate(basis, noisy));
}

int final_measurement(const WireRun& run, const Unitary2& basis, const NoiseModel& noise_inv,
                      CounterRng& rng, const Effect& effect) {
  return rng.bernoulli(survival_probability(run, basis, noise_inv, effect));
}

}  // namespace mbrb
