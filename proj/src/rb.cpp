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

#include "mbrb/rb.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "mbrb/error.hpp"
#include "mbrb/rng.hpp"

namespace mbrb {

namespace {

constexpr std::uint64_t kDrawStream = 1;
constexpr std::uint64_t kShotStream = 2;

class Fnv1a {
 public:
  void add(std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      hash_ ^= (v >> (8 * b)) & 0xffu;
      hash_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

double outcome_probability(int m, double bias) { return m ? 0.5 + bias : 0.5 - bias; }

// tr(E s_i) for the Pauli basis, so tr(E rho) = e . coeffs / 2.
Vector4 effect_pauli_coeffs(const Effect& e) {
  Vector4 out;
  const State basis[4] = {State(), State::from_bloch(1, 0, 0), State::from_bloch(0, 1, 0),
                          State::from_bloch(0, 0, 1)};
  const double base = 2.0 * (e.op() * basis[0].density()).trace().real();
  out(0) = base;
  for (int i = 1; i < 4; ++i) {
    out(i) = 2.0 * (e.op() * basis[i].density()).trace().real() - base;
  }
  return out;
}

std::vector<const CliffordElement*> sequence_choices(SequenceMode mode) {
  std::vector<const CliffordElement*> out;
  const auto& set = mode == SequenceMode::full_group ? clifford_group() : coset_reps();
  for (const auto& e : set) out.push_back(&e);
  return out;
}

// One term of the per-block sum: which gate was drawn, the noisy block
// transition, the realized and intended unitaries and the probability weight.
struct Branch {
  Matrix4 transition;
  Unitary2 realized;
  Unitary2 intended;
  double weight = 0.0;
};

bool noise_depends_on_outcomes(const NoiseModel& n) {
  if (n.dependence.outcome_gain != 0.0) return true;
  for (const auto& c : n.components) {
    if (noise_depends_on_outcomes(c)) return true;
  }
  return false;
}

// Branches of a measured block with the given angles. Physical outcomes are
// drawn with the instrument bias; injected coins flip them uniformly.
void append_block_branches(std::vector<Branch>& out, std::span<const double> angles,
                           const Unitary2& intended, double choice_weight,
                           const NoiseModel& noise, const InstrumentConfig& instrument) {
  const int q = static_cast<int>(angles.size());
  const int n_outcomes = 1 << q;
  const int n_coins = instrument.inject_randomness ? n_outcomes : 1;
  const bool keep_physical = noise_depends_on_outcomes(noise);
  std::map<std::pair<int, int>, std::size_t> merged;

  for (int phys = 0; phys < n_outcomes; ++phys) {
    for (int coin = 0; coin < n_coins; ++coin) {
      const int eff = phys ^ coin;
      double w = choice_weight / n_coins;
      std::vector<int> phys_bits(q);
      for (int k = 0; k < q; ++k) {
        phys_bits[k] = (phys >> k) & 1;
        w *= outcome_probability(phys_bits[k], instrument.bias);
      }
      const auto key = std::make_pair(eff, keep_physical ? phys : -1);
      if (auto it = merged.find(key); it != merged.end()) {
        out[it->second].weight += w;
        continue;
      }
      Matrix4 t = Matrix4::Identity();
      Unitary2 u;
      for (int k = 0; k < q; ++k) {
        const Unitary2 step = measurement_unitary(angles[k], (eff >> k) & 1);
        t = channel_from_unitary(step).ptm() * t;
        if (noise.placement == NoisePlacement::after_each_step) {
          const double a[1] = {angles[k]};
          const int m[1] = {phys_bits[k]};
          t = noise.realize(a, m).ptm() * t;
        }
        u = step * u;
      }
      if (noise.placement == NoisePlacement::after_each_block) {
        t = noise.realize(angles, phys_bits).ptm() * t;
      }
      merged.emplace(key, out.size());
      out.push_back({t, u, intended, w});
    }
  }
}

std::vector<Branch> block_branches(const RBConfig& config, const InstrumentConfig& instrument) {
  std::vector<Branch> out;
  switch (config.protocol) {
    case Protocol::circuit: {
      const double w = 1.0 / 24.0;
      for (const auto& g : clifford_group()) {
        const Matrix4 t = config.noise.realize(g.angles).ptm() *
                          channel_from_unitary(g.unitary).ptm();
        out.push_back({t, g.unitary, g.unitary, w});
      }
      break;
    }
    case Protocol::clifford_mbqc: {
      const auto choices = sequence_choices(config.sequence_mode);
      for (const auto* g : choices) {
        append_block_branches(out, g->angles, g->unitary, 1.0 / choices.size(), config.noise,
                              instrument);
      }
      break;
    }
    case Protocol::derandomized_mbqc: {
      const DerandomizedDesign design = derandomized_design(config.phi1, config.phi2);
      append_block_branches(out, design.angles, Unitary2(), 1.0, config.noise, instrument);
      break;
    }
  }
  return out;
}

struct InverseBranch {
  Unitary2 realized;
  double weight;
};

// Ideal inverse block outcomes for each Clifford (clifford-mbqc only).
std::vector<std::vector<InverseBranch>> inverse_branches(const InstrumentConfig& instrument) {
  std::vector<std::vector<InverseBranch>> out;
  for (const auto& g : clifford_group()) {
    std::vector<InverseBranch> branches;
    for (int eff = 0; eff < 8; ++eff) {
      double w = 1.0;
      Unitary2 u;
      for (int k = 0; k < 3; ++k) {
        const int m = (eff >> k) & 1;
        w *= instrument.inject_randomness ? 0.5 : outcome_probability(m, instrument.bias);
        u = measurement_unitary(g.angles[k], m) * u;
      }
      branches.push_back({u, w});
    }
    out.push_back(std::move(branches));
  }
  return out;
}

std::uint64_t checked_pow(std::uint64_t base, int exp, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

State as_state(const Vector4& v) { return State(v); }

class Enumerator {
 public:
  Enumerator(const RBConfig& config, int s)
      : config_(config),
        s_(s),
        branches_(block_branches(config, config.instrument)),
        effect_(config.spam.effect()),
        inverse_noise_(config.inverse_noise().realize()) {
    if (config.protocol == Protocol::clifford_mbqc) inverse_ = inverse_branches(config.instrument);
  }

  std::uint64_t leaves() const {
    const std::uint64_t per_inverse = config_.protocol == Protocol::clifford_mbqc ? 8 : 1;
    const std::uint64_t cap = std::numeric_limits<std::uint64_t>::max() / 16;
    const std::uint64_t body = checked_pow(branches_.size(), s_, cap);
    return body > cap / per_inverse ? cap : body * per_inverse;
  }

  double run() {
    total_ = 0.0;
    descend(0, config_.spam.prepared().coeffs(), Unitary2(), Unitary2(), 1.0);
    return total_;
  }

 private:
  void descend(int depth, const Vector4& state, const Unitary2& realized,
               const Unitary2& intended, double weight) {
    if (depth == s_) {
      total_ += weight * leaf(state, realized, intended);
      return;
    }
    for (const auto& b : branches_) {
      descend(depth + 1, b.transition * state, b.realized * realized, b.intended * intended,
              weight * b.weight);
    }
  }

  double leaf(const Vector4& state, const Unitary2& realized, const Unitary2& intended) const {
    switch (config_.protocol) {
      case Protocol::circuit: {
        const State undone = rotate(realized.adjoint(), as_state(state));
        return measure(effect_, apply(inverse_noise_, undone));
      }
      case Protocol::clifford_mbqc: {
        const int inv = clifford_index(intended.adjoint());
        double sum = 0.0;
        for (const auto& ib : inverse_[inv]) {
          const State after = rotate(ib.realized, as_state(state));
          const Unitary2 total = ib.realized * realized;
          sum += ib.weight *
                 measure(effect_, rotate(total.adjoint(), apply(inverse_noise_, after)));
        }
        return sum;
      }
      case Protocol::derandomized_mbqc:
        return measure(effect_,
                       rotate(realized.adjoint(), apply(inverse_noise_, as_state(state))));
    }
    return 0.0;
  }

  const RBConfig& config_;
  int s_;
  std::vector<Branch> branches_;
  std::vector<std::vector<InverseBranch>> inverse_;
  Effect effect_;
  Channel inverse_noise_;
  double total_ = 0.0;
};

// Kernels shared read-only by every work item of one run.
class ProtocolRunner {
 public:
  explicit ProtocolRunner(const RBConfig& config)
      : config_(config),
        design_(derandomized_design(config.phi1, config.phi2)),
        design_block_(design_.angles, config.noise),
        effect_(config.spam.effect()) {
    for (const auto& g : clifford_group()) {
      noisy_blocks_.emplace_back(g.angles, config.noise);
      ideal_blocks_.emplace_back(g.angles, NoiseModel::none());
      circuit_gates_.push_back(
          compose(config.noise.realize(g.angles), channel_from_unitary(g.unitary)));
    }
  }

  RBRecord run_item(int s, int i) const {
    RBRecord rec;
    rec.length = s;
    rec.sequence = i;
    rec.shots = config_.shots_per_sequence;
    const auto us = static_cast<std::uint64_t>(s);
    const auto ui = static_cast<std::uint64_t>(i);
    CounterRng draw = CounterRng::stream(config_.seed, {kDrawStream, us, ui});
    Fnv1a digest;
    const NoiseModel& noise_inv = config_.inverse_noise();

    switch (config_.protocol) {
      case Protocol::circuit: {
        const auto seq = gen_clifford_sequence(s, SequenceMode::full_group, draw);
        State state = config_.spam.prepared();
        Unitary2 product;
        for (const auto& g : seq) {
          state = apply(circuit_gates_[g.index], state);
          product = g.unitary * product;
          rec.gates.push_back(g.index);
          digest.add(g.index);
        }
        const WireRun run = WireRun::start(rotate(product.adjoint(), state));
        const double prob = survival_probability(run, Unitary2(), noise_inv, effect_);
        for (int shot = 0; shot < rec.shots; ++shot) {
          CounterRng rng = CounterRng::stream(
              config_.seed, {kShotStream, us, ui, static_cast<std::uint64_t>(shot)});
          rec.survivals += rng.bernoulli(prob);
        }
        break;
      }
      case Protocol::clifford_mbqc: {
        const auto seq = gen_clifford_sequence(s, config_.sequence_mode, draw);
        Unitary2 intended;
        for (const auto& g : seq) {
          intended = g.unitary * intended;
          rec.gates.push_back(g.index);
          digest.add(g.index);
        }
        // Inverse assumes all-zero outcomes; byproducts end up in the frame.
        const int inv = clifford_index(intended.adjoint());
        for (int shot = 0; shot < rec.shots; ++shot) {
          CounterRng rng = CounterRng::stream(
              config_.seed, {kShotStream, us, ui, static_cast<std::uint64_t>(shot)});
          WireRun run = WireRun::start(config_.spam.prepared());
          for (const auto& g : seq) {
            run_gate_block(run, noisy_blocks_[g.index], config_.instrument, rng);
          }
          run_gate_block(run, ideal_blocks_[inv], config_.instrument, rng);
          for (int m : run.outcomes) digest.add(m);
          rec.survivals +=
              final_measurement(run, run.pauli_frame.unitary(), noise_inv, rng, effect_);
        }
        break;
      }
      case Protocol::derandomized_mbqc: {
        for (int shot = 0; shot < rec.shots; ++shot) {
          CounterRng rng = CounterRng::stream(
              config_.seed, {kShotStream, us, ui, static_cast<std::uint64_t>(shot)});
          WireRun run = WireRun::start(config_.spam.prepared());
          Unitary2 tracked;
          for (int j = 0; j < s; ++j) {
            const auto out = run_gate_block(run, design_block_, config_.instrument, rng);
            const unsigned idx =
                outcome_index(Outcomes5{out[0], out[1], out[2], out[3], out[4]});
            tracked = design_.elements[idx] * tracked;
            digest.add(idx);
          }
          rec.survivals += final_measurement(run, tracked.adjoint(), noise_inv, rng, effect_);
        }
        break;
      }
    }
    rec.digest = digest.value();
    return rec;
  }

 private:
  const RBConfig& config_;
  DerandomizedDesign design_;
  BlockKernel design_block_;
  Effect effect_;
  std::vector<BlockKernel> noisy_blocks_;
  std::vector<BlockKernel> ideal_blocks_;
  std::vector<Channel> circuit_gates_;
};

}  // namespace

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::circuit: return "circuit";
    case Protocol::clifford_mbqc: return "clifford-mbqc";
    case Protocol::derandomized_mbqc: return "derandomized-mbqc";
  }
  return "circuit";
}

std::string to_string(SequenceMode m) {
  return m == SequenceMode::full_group ? "full-group" : "coset-reps";
}

Protocol parse_protocol(const std::string& s) {
  for (Protocol p : {Protocol::circuit, Protocol::clifford_mbqc, Protocol::derandomized_mbqc}) {
    if (to_string(p) == s) return p;
  }
  throw InvalidArgument("unknown protocol '" + s + "'");
}

SequenceMode parse_sequence_mode(const std::string& s) {
  if (s == "full-group") return SequenceMode::full_group;
  if (s == "coset-reps") return SequenceMode::coset_reps;
  throw InvalidArgument("unknown sequence mode '" + s + "'");
}

State SpamModel::prepared() const { return State::from_bloch(prep_shrink, 0.0, 0.0); }

Effect SpamModel::effect() const {
  Matrix2c e;
  // |+><+| + b |-><-|
  const double b = effect_bias;
  e << 0.5 * (1.0 + b), 0.5 * (1.0 - b), 0.5 * (1.0 - b), 0.5 * (1.0 + b);
  return Effect(e);
}

void SpamModel::validate() const {
  if (!(prep_shrink >= 0.0 && prep_shrink <= 1.0)) {
    throw InvalidArgument("prep_shrink must lie in [0, 1]");
  }
  if (!(effect_bias >= 0.0 && effect_bias <= 1.0)) {
    throw InvalidArgument("effect_bias must lie in [0, 1]");
  }
}

void RBConfig::validate() const {
  if (lengths.empty()) throw InvalidArgument("at least one sequence length is required");
  for (int s : lengths) {
    if (s < 1) throw InvalidArgument("sequence lengths must be >= 1");
  }
  if (sequences_per_length < 1) throw InvalidArgument("sequences_per_length must be >= 1");
  if (shots_per_sequence < 1) throw InvalidArgument("shots_per_sequence must be >= 1");
  if (!std::isfinite(phi1) || !std::isfinite(phi2)) {
    throw InvalidArgument("design phases must be finite");
  }
  noise.validate();
  if (noise_inv) noise_inv->validate();
  instrument.validate();
  spam.validate();
}

std::vector<std::string> RBConfig::warnings() const {
  std::vector<std::string> out;
  const bool biased = instrument.bias != 0.0 && !instrument.inject_randomness;
  if (biased && protocol == Protocol::derandomized_mbqc) {
    out.push_back(
        "non-uniform-outcomes: the derandomized design is a 2-design only for equally "
        "probable outcomes; enable inject_randomness");
  }
  if (biased && protocol == Protocol::clifford_mbqc &&
      sequence_mode == SequenceMode::coset_reps) {
    out.push_back(
        "non-uniform-outcomes: coset-reps sequences cover C1 uniformly only for equally "
        "probable outcomes; use full-group or enable inject_randomness");
  }
  return out;
}

std::vector<CliffordElement> gen_clifford_sequence(int s, SequenceMode mode, CounterRng& rng) {
  if (s < 1) throw InvalidArgument("sequence length must be >= 1");
  const auto& set = mode == SequenceMode::full_group ? clifford_group() : coset_reps();
  std::vector<CliffordElement> seq;
  seq.reserve(s);
  for (int j = 0; j < s; ++j) seq.push_back(set[rng.below(set.size())]);
  return seq;
}

Unitary2 sequence_inverse(std::span<const Unitary2> realized) {
  if (realized.empty()) throw InvalidArgument("sequence must be nonempty");
  Unitary2 product;
  for (const auto& u : realized) product = u * product;
  return product.adjoint();
}

RBDataset run_protocol(const RBConfig& config, int threads) {
  config.validate();
  RBDataset data;
  data.config = config;
  data.warnings = config.warnings();

  std::vector<std::pair<int, int>> items;
  for (int s : config.lengths) {
    for (int i = 0; i < config.sequences_per_length; ++i) items.emplace_back(s, i);
  }
  data.records.resize(items.size());

  const ProtocolRunner runner(config);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < items.size(); k = next++) {
      try {
        data.records[k] = runner.run_item(items[k].first, items[k].second);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return data;
}

SequenceEstimate sequence_fidelity_estimate(const RBDataset& dataset, int s) {
  SequenceEstimate est;
  std::vector<double> means;
  long long survivals = 0;
  for (const auto& r : dataset.records) {
    if (r.length != s) continue;
    means.push_back(static_cast<double>(r.survivals) / r.shots);
    survivals += r.survivals;
    est.shots += r.shots;
  }
  if (means.empty()) throw NotFound("dataset has no records at length " + std::to_string(s));
  est.sequences = static_cast<int>(means.size());
  est.mean = static_cast<double>(survivals) / static_cast<double>(est.shots);
  if (means.size() > 1) {
    double mu = 0.0;
    for (double m : means) mu += m;
    mu /= means.size();
    double var = 0.0;
    for (double m : means) var += (m - mu) * (m - mu);
    var /= static_cast<double>(means.size() - 1);
    est.std_error = std::sqrt(var / means.size());
  }
  return est;
}

double AnalyticModel::at(int s) const { return a0 * std::pow(p, s) + b0; }

AnalyticModel analytic_model(const RBConfig& config) {
  config.validate();
  InstrumentConfig uniform = config.instrument;
  uniform.bias = 0.0;
  const auto branches = block_branches(config, uniform);

  AnalyticModel model;
  model.p = 0.0;
  double total_weight = 0.0;
  for (const auto& b : branches) {
    // Noise of this element: the block transition with the ideal gate undone.
    const Matrix4 d = b.transition * channel_from_unitary(b.realized).ptm().transpose();
    model.p += b.weight * (d(1, 1) + d(2, 2) + d(3, 3)) / 3.0;
    total_weight += b.weight;
  }
  model.p /= total_weight;

  const Channel d_inv = config.inverse_noise().realize();
  const Vector4 e = effect_pauli_coeffs(config.spam.effect());
  Vector4 centred = config.spam.prepared().coeffs();
  centred(0) = 0.0;
  const Vector4 unit(1.0, 0.0, 0.0, 0.0);

  switch (config.protocol) {
    case Protocol::circuit:
      model.a0 = 0.5 * e.dot(d_inv.ptm() * centred);
      model.b0 = 0.5 * e.dot(d_inv.ptm() * unit);
      break;
    case Protocol::clifford_mbqc: {
      // The final rotation by a uniformly random Pauli frame Pauli-twirls D_inv.
      const Matrix4 d_eff = twirl(d_inv, pauli_group()).ptm();
      model.a0 = 0.5 * e.dot(d_eff * centred);
      model.b0 = 0.5 * e.dot(d_eff * unit);
      break;
    }
    case Protocol::derandomized_mbqc: {
      // D_inv is twirled jointly with the last element's noise; that factor
      // decays with p_last.
      double p_last = 0.0;
      for (const auto& b : branches) {
        const Matrix4 d = d_inv.ptm() * b.transition *
                          channel_from_unitary(b.realized).ptm().transpose();
        p_last += b.weight * (d(1, 1) + d(2, 2) + d(3, 3)) / 3.0;
      }
      p_last /= total_weight;
      const double ratio = model.p > 0.0 ? p_last / model.p : 0.0;
      model.a0 = 0.5 * e.dot(centred) * ratio;
      model.b0 = 0.5 * e(0);
      break;
    }
  }
  return model;
}

std::uint64_t enumeration_leaves(const RBConfig& config, int s) {
  if (s < 1) throw InvalidArgument("sequence length must be >= 1");
  config.validate();
  return Enumerator(config, s).leaves();
}

ExactFidelity exact_sequence_fidelity(const RBConfig& config, int s, std::uint64_t max_leaves) {
  if (s < 1) throw InvalidArgument("sequence length must be >= 1");
  config.validate();
  Enumerator enumerator(config, s);
  ExactFidelity out;
  out.leaves = enumerator.leaves();
  if (out.leaves > max_leaves) {
    throw SizeLimit("exact enumeration at s = " + std::to_string(s) + " needs " +
                    std::to_string(out.leaves) + " terms (limit " +
                    std::to_string(max_leaves) + ")");
  }
  out.enumerated = enumerator.run();
  out.analytic = analytic_model(config).at(s);
  return out;
}

}  // namespace mbrb
