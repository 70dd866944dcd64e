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

#include "mbrb/fit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mbrb/error.hpp"
#include "mbrb/rng.hpp"

namespace mbrb {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kRelTol = 1e-12;

struct Params {
  double a0 = 0.0;
  double b0 = 0.0;
  double p = 1.0;
};

struct Problem {
  std::vector<double> s;
  std::vector<double> y;
  std::vector<double> w;

  double cost(const Params& q) const {
    double c = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double r = q.a0 * std::pow(q.p, s[k]) + q.b0 - y[k];
      c += w[k] * r * r;
    }
    return c;
  }
};

Params clamp_params(Params q) {
  q.a0 = std::clamp(q.a0, -1.0, 1.0);
  q.b0 = std::clamp(q.b0, 0.0, 1.0);
  q.p = std::clamp(q.p, 0.0, 1.0);
  return q;
}

// Weighted linear least squares for (a0, b0) at fixed p.
Params solve_linear(const Problem& pr, double p) {
  double sxx = 0, sx = 0, s1 = 0, sxy = 0, sy = 0;
  for (std::size_t k = 0; k < pr.s.size(); ++k) {
    const double x = std::pow(p, pr.s[k]);
    sxx += pr.w[k] * x * x;
    sx += pr.w[k] * x;
    s1 += pr.w[k];
    sxy += pr.w[k] * x * pr.y[k];
    sy += pr.w[k] * pr.y[k];
  }
  const double det = sxx * s1 - sx * sx;
  Params q;
  q.p = p;
  if (std::abs(det) < 1e-300) {
    q.a0 = 0.0;
    q.b0 = sy / s1;
  } else {
    q.a0 = (sxy * s1 - sx * sy) / det;
    q.b0 = (sxx * sy - sx * sxy) / det;
  }
  return clamp_params(q);
}

// Plateau for B0, then log-linear regression of |mean - B0| for p and A0.
Params plateau_start(const Problem& pr) {
  std::vector<std::size_t> order(pr.s.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return pr.s[a] > pr.s[b]; });
  Params q;
  q.b0 = 0.5 * (pr.y[order[0]] + pr.y[order[1]]);

  int positive = 0, negative = 0;
  for (std::size_t k = 0; k < pr.s.size(); ++k) {
    if (pr.y[k] > q.b0) ++positive;
    if (pr.y[k] < q.b0) ++negative;
  }
  const double sign = positive >= negative ? 1.0 : -1.0;
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (std::size_t k = 0; k < pr.s.size(); ++k) {
    const double d = sign * (pr.y[k] - q.b0);
    if (d <= 1e-12) continue;
    const double ly = std::log(d);
    sw += pr.w[k];
    sx += pr.w[k] * pr.s[k];
    sy += pr.w[k] * ly;
    sxx += pr.w[k] * pr.s[k] * pr.s[k];
    sxy += pr.w[k] * pr.s[k] * ly;
    ++used;
  }
  const double det = sw * sxx - sx * sx;
  if (used < 2 || std::abs(det) < 1e-300) {
    q.p = 0.9;
    q.a0 = sign * 0.5;
    return clamp_params(q);
  }
  const double slope = (sw * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / sw;
  q.p = std::exp(slope);
  q.a0 = sign * std::exp(intercept);
  return clamp_params(q);
}

Params grid_start(const Problem& pr) {
  Params best = solve_linear(pr, 0.5);
  double best_cost = pr.cost(best);
  auto consider = [&](double p) {
    const Params q = solve_linear(pr, p);
    const double c = pr.cost(q);
    if (c < best_cost) {
      best = q;
      best_cost = c;
    }
  };
  for (int k = 1; k < 20; ++k) consider(0.05 * k);
  for (int k = 1; k < 50; ++k) consider(0.95 + 0.001 * k);
  consider(0.9995);
  return best;
}

// Projected Levenberg-Marquardt on (a0, b0, p).
Params refine(const Problem& pr, Params q, int& iterations) {
  double cost = pr.cost(q);
  double lambda = 1e-3;
  for (iterations = 0; iterations < kMaxIterations; ++iterations) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < pr.s.size(); ++k) {
      const double ps = std::pow(q.p, pr.s[k]);
      const double dp = pr.s[k] == 0.0 ? 0.0 : q.a0 * pr.s[k] * std::pow(q.p, pr.s[k] - 1.0);
      const Eigen::Vector3d j(ps, 1.0, dp);
      const double r = q.a0 * ps + q.b0 - pr.y[k];
      jtj += pr.w[k] * j * j.transpose();
      jtr += pr.w[k] * r * j;
    }
    bool accepted = false;
    Params next;
    double next_cost = cost;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Eigen::Matrix3d damped = jtj;
      for (int d = 0; d < 3; ++d) damped(d, d) += lambda * std::max(jtj(d, d), 1e-300);
      const Eigen::Vector3d step = damped.ldlt().solve(-jtr);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      next = clamp_params({q.a0 + step(0), q.b0 + step(1), q.p + step(2)});
      next_cost = pr.cost(next);
      if (next_cost <= cost) {
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) break;
    const double change = std::max({std::abs(next.a0 - q.a0) / (std::abs(q.a0) + kRelTol),
                                    std::abs(next.b0 - q.b0) / (std::abs(q.b0) + kRelTol),
                                    std::abs(next.p - q.p) / (std::abs(q.p) + kRelTol)});
    const double improvement = cost - next_cost;
    q = next;
    cost = next_cost;
    lambda = std::max(lambda / 10.0, 1e-15);
    if (change <= kRelTol || improvement <= kRelTol * kRelTol * std::max(cost, 1e-300)) break;
  }
  return q;
}

bool on_bound(const Params& q) {
  return q.p <= 0.0 || q.p >= 1.0 || q.b0 <= 0.0 || q.b0 >= 1.0 || std::abs(q.a0) >= 1.0;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

DecayPoint point_from_fractions(double length, const std::vector<int>& survivals,
                                const std::vector<int>& shots,
                                const std::vector<std::size_t>& pick) {
  long long total_s = 0, total_n = 0;
  std::vector<double> fractions;
  for (std::size_t k : pick) {
    total_s += survivals[k];
    total_n += shots[k];
    fractions.push_back(static_cast<double>(survivals[k]) / shots[k]);
  }
  DecayPoint pt{length, static_cast<double>(total_s) / static_cast<double>(total_n), 0.0};
  if (fractions.size() > 1) {
    double mu = 0.0;
    for (double f : fractions) mu += f;
    mu /= fractions.size();
    double var = 0.0;
    for (double f : fractions) var += (f - mu) * (f - mu);
    var /= static_cast<double>(fractions.size() - 1);
    pt.std_error = std::sqrt(var / fractions.size());
  }
  return pt;
}

}  // namespace

double fidelity_from_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in [0, 1]");
  return (1.0 + p) / 2.0;
}

DecayFit fit_decay(std::span<const DecayPoint> points) {
  std::set<double> distinct;
  for (const auto& pt : points) {
    if (!std::isfinite(pt.length) || !std::isfinite(pt.mean)) {
      throw InvalidArgument("decay points must be finite");
    }
    if (pt.mean < -1e-12 || pt.mean > 1.0 + 1e-12) {
      throw InvalidArgument("sequence fidelities must lie in [0, 1]");
    }
    distinct.insert(pt.length);
  }
  if (distinct.size() < 3) {
    throw InsufficientData("the decay fit needs at least three distinct sequence lengths");
  }

  Problem pr;
  double min_se = 0.0;
  for (const auto& pt : points) {
    if (pt.std_error > 0.0 && (min_se == 0.0 || pt.std_error < min_se)) min_se = pt.std_error;
  }
  for (const auto& pt : points) {
    pr.s.push_back(pt.length);
    pr.y.push_back(pt.mean);
    const double se = pt.std_error > 0.0 ? pt.std_error : min_se;
    pr.w.push_back(se > 0.0 ? 1.0 / (se * se) : 1.0);
  }

  DecayFit fit;
  const auto [lo, hi] = std::minmax_element(pr.y.begin(), pr.y.end());
  if (*hi - *lo <= 1e-12) {
    fit.degenerate = true;
    fit.p = 1.0;
    fit.a0 = 0.0;
    fit.b0 = std::clamp(pr.y.front(), 0.0, 1.0);
    fit.avg_fidelity = fidelity_from_p(fit.p);
    fit.residual_norm = std::sqrt(pr.cost({fit.a0, fit.b0, fit.p}));
    return fit;
  }

  int it_plateau = 0, it_grid = 0;
  const Params from_plateau = refine(pr, plateau_start(pr), it_plateau);
  const Params from_grid = refine(pr, grid_start(pr), it_grid);
  const bool use_grid = pr.cost(from_grid) < pr.cost(from_plateau);
  Params best = use_grid ? from_grid : from_plateau;
  // p on the grid where 1 + p is exact.
  best.p = (1.0 + best.p) - 1.0;

  fit.a0 = best.a0;
  fit.b0 = best.b0;
  fit.p = best.p;
  fit.avg_fidelity = fidelity_from_p(best.p);
  fit.residual_norm = std::sqrt(pr.cost(best));
  fit.clamped = on_bound(best);
  fit.iterations = use_grid ? it_grid : it_plateau;
  return fit;
}

std::vector<DecayPoint> decay_points(const RBDataset& dataset) {
  std::map<int, std::vector<std::size_t>> by_length;
  std::vector<int> survivals, shots;
  for (std::size_t k = 0; k < dataset.records.size(); ++k) {
    const auto& r = dataset.records[k];
    by_length[r.length].push_back(k);
    survivals.push_back(r.survivals);
    shots.push_back(r.shots);
  }
  std::vector<DecayPoint> out;
  for (const auto& [s, idx] : by_length) {
    out.push_back(point_from_fractions(s, survivals, shots, idx));
  }
  return out;
}

std::pair<double, double> bootstrap_ci(const RBDataset& dataset, int resamples, CounterRng& rng,
                                       double level) {
  if (resamples < 100) throw InvalidArgument("bootstrap needs at least 100 resamples");
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("level must lie in (0, 1)");
  std::map<int, std::vector<std::size_t>> by_length;
  std::vector<int> survivals, shots;
  for (std::size_t k = 0; k < dataset.records.size(); ++k) {
    const auto& r = dataset.records[k];
    by_length[r.length].push_back(k);
    survivals.push_back(r.survivals);
    shots.push_back(r.shots);
  }
  const std::uint64_t base = rng();
  std::vector<double> ps;
  ps.reserve(resamples);
  for (int b = 0; b < resamples; ++b) {
    CounterRng local = CounterRng::stream(base, {static_cast<std::uint64_t>(b)});
    std::vector<DecayPoint> pts;
    for (const auto& [s, idx] : by_length) {
      std::vector<std::size_t> pick(idx.size());
      for (auto& k : pick) k = idx[local.below(idx.size())];
      pts.push_back(point_from_fractions(s, survivals, shots, pick));
    }
    ps.push_back(fit_decay(pts).p);
  }
  const double tail = 0.5 * (1.0 - level);
  return {quantile(ps, tail), quantile(ps, 1.0 - tail)};
}

}  // namespace mbrb
