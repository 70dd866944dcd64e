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

// Zeroth-order decay fit F(s) = A0 p^s + B0 and the conversion of p to an
// average gate fidelity.

#include <span>
#include <utility>
#include <vector>

#include "mbrb/rb.hpp"

namespace mbrb {

class CounterRng;

struct DecayPoint {
  double length = 0.0;
  double mean = 0.0;
  /// Non-positive means "unknown"; see fit_decay for how weights are chosen.
  double std_error = 0.0;
};

struct DecayFit {
  double a0 = 0.0;
  double b0 = 0.0;
  double p = 1.0;
  double avg_fidelity = 1.0;
  /// sqrt of the weighted sum of squared residuals.
  double residual_norm = 0.0;
  std::pair<double, double> ci_p{1.0, 1.0};
  /// All means identical: p is undefined and reported as 1 with A0 = 0.
  bool degenerate = false;
  /// A parameter finished on its bound (0 <= p <= 1, 0 <= B0 <= 1, |A0| <= 1).
  bool clamped = false;
  int iterations = 0;
};

/// Weighted least squares fit of A0 p^s + B0.
///
/// Weights are 1/stderr^2. Zero stderrs are floored at the smallest positive
/// one, and unit weights are used when no stderr is positive. Starts from a
/// plateau/log-linear estimate and from the best point of a p grid (with A0,
/// B0 solved linearly), refines both with bounded damped Gauss-Newton
/// iterations and keeps the lower cost.
///
/// Throws InsufficientData for fewer than three distinct lengths and
/// InvalidArgument for means outside [0, 1].
DecayFit fit_decay(std::span<const DecayPoint> points);

/// (1 + p) / 2. Throws InvalidArgument outside [0, 1].
double fidelity_from_p(double p);

/// One point per length: pooled mean and the standard error of the
/// per-sequence means, sorted by length.
std::vector<DecayPoint> decay_points(const RBDataset& dataset);

/// Nonparametric bootstrap over sequences within each length; returns the
/// percentile interval for p at the given level. Throws InvalidArgument for
/// fewer than 100 resamples.
std::pair<double, double> bootstrap_ci(const RBDataset& dataset, int resamples, CounterRng& rng,
                                       double level = 0.95);

}  // namespace mbrb
