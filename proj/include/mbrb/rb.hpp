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

// Randomized-benchmarking protocols on a cluster wire, Monte Carlo
// estimators, and exact enumeration oracles.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mbrb/channel.hpp"
#include "mbrb/gatesets.hpp"
#include "mbrb/wire.hpp"

namespace mbrb {

class CounterRng;

inline constexpr const char* kToolkitVersion = "0.1.0";

enum class Protocol { circuit, clifford_mbqc, derandomized_mbqc };
/// Where clifford-mbqc draws its sequence: all of C1, or only the coset
/// representatives T1 with outcome randomness supplying the Pauli part.
enum class SequenceMode { full_group, coset_reps };

std::string to_string(Protocol p);
std::string to_string(SequenceMode m);
Protocol parse_protocol(const std::string& s);
SequenceMode parse_sequence_mode(const std::string& s);

/// Logical preparation and readout imperfections.
///
/// The prepared state is |+> with its Bloch vector scaled by prep_shrink; the
/// readout effect is |+><+| + effect_bias |-><-|, i.e. a false-positive rate.
struct SpamModel {
  double prep_shrink = 1.0;
  double effect_bias = 0.0;

  State prepared() const;
  Effect effect() const;
  void validate() const;
  friend bool operator==(const SpamModel&, const SpamModel&) = default;
};

struct RBConfig {
  Protocol protocol = Protocol::clifford_mbqc;
  std::vector<int> lengths;
  int sequences_per_length = 1;
  int shots_per_sequence = 1;
  NoiseModel noise;
  /// Noise on the inverse / final measurement; defaults to `noise`.
  std::optional<NoiseModel> noise_inv;
  InstrumentConfig instrument;
  SpamModel spam;
  std::uint64_t seed = 0;
  double phi1 = 0.0;
  double phi2 = 0.0;
  SequenceMode sequence_mode = SequenceMode::coset_reps;

  const NoiseModel& inverse_noise() const { return noise_inv ? *noise_inv : noise; }
  /// Throws InvalidArgument on empty lengths, s < 1, K_s < 1 or shots < 1,
  /// and on invalid noise, instrument or SPAM settings.
  void validate() const;
  /// Warnings for settings that void the protocol's assumptions.
  std::vector<std::string> warnings() const;

  friend bool operator==(const RBConfig&, const RBConfig&) = default;
};

struct RBRecord {
  int length = 0;
  int sequence = 0;
  /// Drawn Clifford indices; empty for the derandomized protocol.
  std::vector<int> gates;
  int survivals = 0;
  int shots = 0;
  /// FNV-1a digest over drawn gates and realized outcomes of every shot.
  std::uint64_t digest = 0;

  friend bool operator==(const RBRecord&, const RBRecord&) = default;
};

struct RBDataset {
  RBConfig config;
  std::vector<RBRecord> records;
  std::vector<std::string> warnings;
};

/// s elements drawn uniformly from C1 or T1.
std::vector<CliffordElement> gen_clifford_sequence(int s, SequenceMode mode, CounterRng& rng);

/// (U_s ... U_1)^dagger. Throws InvalidArgument on an empty sequence.
Unitary2 sequence_inverse(std::span<const Unitary2> realized);

/// Runs every (s, i) work item; deterministic for a fixed seed regardless of
/// `threads`.
RBDataset run_protocol(const RBConfig& config, int threads = 1);

struct SequenceEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int sequences = 0;
  long long shots = 0;
};

/// Mean survival over all shots at s; standard error of the per-sequence means.
/// Throws NotFound when the dataset has no records at s.
SequenceEstimate sequence_fidelity_estimate(const RBDataset& dataset, int s);

/// F(s) = a0 p^s + b0 with the noise twirled into a depolarizing channel.
struct AnalyticModel {
  double a0 = 0.0;
  double b0 = 0.0;
  double p = 1.0;
  double at(int s) const;
};

/// Zeroth-order prediction for the configured protocol, assuming outcomes
/// are uniform and the per-element noise is replaced by its twirl.
AnalyticModel analytic_model(const RBConfig& config);

inline constexpr std::uint64_t kMaxEnumerationLeaves = 100'000'000;

struct ExactFidelity {
  double enumerated = 0.0;
  double analytic = 0.0;
  std::uint64_t leaves = 0;
};

/// Number of terms exact_sequence_fidelity would sum at length s.
std::uint64_t enumeration_leaves(const RBConfig& config, int s);

/// Exact average survival over all sequences (and, for MBQC protocols, all
/// outcome strings weighted by probability) plus the analytic value. Throws
/// SizeLimit when the sum has more than `max_leaves` terms.
ExactFidelity exact_sequence_fidelity(const RBConfig& config, int s,
                                      std::uint64_t max_leaves = kMaxEnumerationLeaves);

}  // namespace mbrb
