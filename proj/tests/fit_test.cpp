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

#include <cmath>

#include <gtest/gtest.h>

#include "mbrb/error.hpp"
#include "mbrb/fit.hpp"
#include "mbrb/rb.hpp"
#include "mbrb/rng.hpp"

namespace mbrb {
namespace {

std::vector<DecayPoint> model_points(double a0, double b0, double p, int smax,
                                     double se = 0.01) {
  std::vector<DecayPoint> pts;
  for (int s = 1; s <= smax; ++s) pts.push_back({double(s), a0 * std::pow(p, s) + b0, se});
  return pts;
}

RBConfig depolarizing_config(Protocol protocol, double p) {
  RBConfig c;
  c.protocol = protocol;
  c.lengths = {1};
  c.noise = NoiseModel::depolarizing(p);
  c.noise_inv = NoiseModel::none();
  return c;
}

TEST(FitDecay, RecoversExactModel) {
  const auto fit = fit_decay(model_points(0.5, 0.5, 0.98, 20));
  EXPECT_NEAR(fit.a0, 0.5, 1e-9);
  EXPECT_NEAR(fit.b0, 0.5, 1e-9);
  EXPECT_NEAR(fit.p, 0.98, 1e-9);
  EXPECT_NEAR(fit.avg_fidelity, 0.99, 1e-9);
  EXPECT_LT(fit.residual_norm, 1e-8);
  EXPECT_FALSE(fit.degenerate);
  EXPECT_FALSE(fit.clamped);
}

TEST(FitDecay, PropertyConsistencyGrid) {
  for (double p : {0.5, 0.9, 0.99}) {
    for (double a0 : {0.3, 0.5}) {
      for (double b0 : {0.4, 0.5}) {
        const auto fit = fit_decay(model_points(a0, b0, p, 20));
        EXPECT_NEAR(fit.p, p, 1e-9) << p << " " << a0 << " " << b0;
        EXPECT_NEAR(fit.a0, a0, 1e-9) << p << " " << a0 << " " << b0;
        EXPECT_NEAR(fit.b0, b0, 1e-9) << p << " " << a0 << " " << b0;
        EXPECT_EQ(fit.p, 2 * fit.avg_fidelity - 1);
        EXPECT_EQ(fit.avg_fidelity, (1 + fit.p) / 2);
      }
    }
  }
}

TEST(FitDecay, UnitWeightsWhenStderrAbsent) {
  const auto fit = fit_decay(model_points(0.45, 0.5, 0.9, 12, 0.0));
  EXPECT_NEAR(fit.p, 0.9, 1e-9);
}

TEST(FitDecay, ExactProtocolDataGivesDepolarizingParameter) {
  for (Protocol protocol : {Protocol::circuit, Protocol::clifford_mbqc,
                            Protocol::derandomized_mbqc}) {
    const AnalyticModel model = analytic_model(depolarizing_config(protocol, 0.96));
    std::vector<DecayPoint> pts;
    for (int s = 1; s <= 20; ++s) pts.push_back({double(s), model.at(s), 0.0});
    // The model values themselves are pinned to enumeration at small s.
    const RBConfig c = depolarizing_config(protocol, 0.96);
    for (int s = 1; s <= 3; ++s) {
      EXPECT_NEAR(exact_sequence_fidelity(c, s).enumerated, model.at(s), 1e-9);
    }
    const auto fit = fit_decay(pts);
    EXPECT_NEAR(fit.p, 0.96, 1e-6) << to_string(protocol);
    EXPECT_NEAR(fit.avg_fidelity, 0.98, 1e-6) << to_string(protocol);
  }
}

TEST(FitDecay, ConstantDataIsDegenerate) {
  std::vector<DecayPoint> pts;
  for (int s = 1; s <= 5; ++s) pts.push_back({double(s), 0.5, 0.01});
  const auto fit = fit_decay(pts);
  EXPECT_TRUE(fit.degenerate);
  EXPECT_EQ(fit.p, 1.0);
  EXPECT_EQ(fit.a0, 0.0);
  EXPECT_EQ(fit.b0, 0.5);
  EXPECT_EQ(fit.avg_fidelity, 1.0);
}

TEST(FitDecay, Errors) {
  std::vector<DecayPoint> two{{1, 0.9, 0.01}, {2, 0.8, 0.01}, {2, 0.81, 0.01}};
  EXPECT_THROW(fit_decay(two), InsufficientData);
  std::vector<DecayPoint> bad{{1, 0.9, 0.01}, {2, 1.2, 0.01}, {3, 0.8, 0.01}};
  EXPECT_THROW(fit_decay(bad), InvalidArgument);
}

TEST(FitDecay, ClampsAndFlagsAtBounds) {
  // Growing data would want p > 1.
  std::vector<DecayPoint> pts{{1, 0.5, 0.01}, {2, 0.6, 0.01}, {3, 0.7, 0.01}, {4, 0.8, 0.01}};
  const auto fit = fit_decay(pts);
  EXPECT_TRUE(fit.clamped);
  EXPECT_GE(fit.p, 0.0);
  EXPECT_LE(fit.p, 1.0);
  EXPECT_LE(std::abs(fit.a0), 1.0);
  EXPECT_GE(fit.b0, 0.0);
  EXPECT_LE(fit.b0, 1.0);
}

TEST(FitDecay, SpamChangesOffsetsButNotDecay) {
  for (Protocol protocol : {Protocol::clifford_mbqc, Protocol::derandomized_mbqc}) {
    RBConfig ideal = depolarizing_config(protocol, 0.96);
    RBConfig noisy = ideal;
    noisy.spam = {0.9, 0.05};
    const AnalyticModel mi = analytic_model(ideal), mn = analytic_model(noisy);
    for (int s = 1; s <= 3; ++s) {
      EXPECT_NEAR(exact_sequence_fidelity(noisy, s).enumerated, mn.at(s), 1e-9);
    }
    std::vector<DecayPoint> pi, pn;
    for (int s = 1; s <= 20; ++s) {
      pi.push_back({double(s), mi.at(s), 0.0});
      pn.push_back({double(s), mn.at(s), 0.0});
    }
    const auto fi = fit_decay(pi), fn = fit_decay(pn);
    EXPECT_LT(std::abs(fi.p - fn.p), 1e-6);
    EXPECT_GT(std::abs(fi.a0 - fn.a0), 1e-3);
    EXPECT_GT(std::abs(fi.b0 - fn.b0), 1e-3);
  }
}

TEST(FidelityFromP, Examples) {
  EXPECT_EQ(fidelity_from_p(1.0), 1.0);
  EXPECT_EQ(fidelity_from_p(0.0), 0.5);
  EXPECT_NEAR(fidelity_from_p(0.96), 0.98, 1e-15);
  EXPECT_THROW(fidelity_from_p(1.0001), InvalidArgument);
  EXPECT_THROW(fidelity_from_p(-0.1), InvalidArgument);
}

TEST(DecayPoints, PoolsAndSorts) {
  RBDataset ds;
  ds.records = {{3, 0, {}, 5, 10, 0}, {1, 0, {}, 9, 10, 0}, {1, 1, {}, 7, 10, 0}};
  const auto pts = decay_points(ds);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].length, 1.0);
  EXPECT_NEAR(pts[0].mean, 0.8, 1e-15);
  EXPECT_NEAR(pts[0].std_error, 0.1, 1e-15);
  EXPECT_EQ(pts[1].length, 3.0);
  EXPECT_EQ(pts[1].std_error, 0.0);
}

RBConfig circuit_experiment(double p, int shots, std::uint64_t seed) {
  RBConfig c;
  c.protocol = Protocol::circuit;
  c.lengths = {1, 2, 4, 8, 16, 32};
  c.sequences_per_length = 20;
  c.shots_per_sequence = shots;
  c.noise = NoiseModel::depolarizing(p);
  c.noise_inv = NoiseModel::none();
  c.seed = seed;
  return c;
}

TEST(BootstrapCi, ZeroNoiseCollapses) {
  RBConfig c = circuit_experiment(1.0, 20, 1);
  c.noise = NoiseModel::none();
  const RBDataset ds = run_protocol(c);
  CounterRng rng(1);
  const auto ci = bootstrap_ci(ds, 100, rng);
  EXPECT_EQ(ci.first, 1.0);
  EXPECT_EQ(ci.second, 1.0);
  EXPECT_THROW(bootstrap_ci(ds, 99, rng), InvalidArgument);
}

TEST(BootstrapCi, DeterministicGivenRng) {
  const RBDataset ds = run_protocol(circuit_experiment(0.95, 50, 2));
  CounterRng a(9), b(9);
  EXPECT_EQ(bootstrap_ci(ds, 100, a), bootstrap_ci(ds, 100, b));
}

TEST(BootstrapCi, CoverageCalibration) {
  const double p_true = 0.95;
  int covered = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const RBDataset ds = run_protocol(circuit_experiment(p_true, 100, 1000 + trial));
    CounterRng rng = CounterRng::stream(5000 + trial, {});
    const auto ci = bootstrap_ci(ds, 200, rng);
    if (ci.first <= p_true && p_true <= ci.second) ++covered;
  }
  RecordProperty("covered_of_100", covered);
  EXPECT_GE(covered, 90);
}

TEST(BootstrapCi, MoreShotsNarrowTheInterval) {
  double narrow = 0.0, wide = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    CounterRng r1(trial), r2(trial);
    const auto w = bootstrap_ci(run_protocol(circuit_experiment(0.95, 50, 300 + trial)), 100, r1);
    const auto n = bootstrap_ci(run_protocol(circuit_experiment(0.95, 100, 400 + trial)), 100, r2);
    wide += w.second - w.first;
    narrow += n.second - n.first;
  }
  EXPECT_LT(narrow, wide);
}

}  // namespace
}  // namespace mbrb
