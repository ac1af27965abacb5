// Copyright 2026 The IntraMix Lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INTRAMIX_THEORY_HPP_
#define INTRAMIX_THEORY_HPP_

// Noise-reduction guarantees for intra-class mixup, in closed form and by
// simulation.
//
// Label noise. With eps, eps1, eps2 i.i.d. N(0, s^2) and c = l^2 + (1-l)^2,
// the mixed noise l*eps1 + (1-l)*eps2 is N(0, c s^2), so
//   P(|l*eps1 + (1-l)*eps2| < |eps|)   = (2/pi) atan(c^-1/2)
//   E|l*eps1 + (1-l)*eps2| / E|eps1|   = c^1/2
// independent of s. The ratio is measured against the first parent, which
// makes l = 1 exact.
//
// Propagation noise. Two same-class nodes m (clean) and n (feature noise
// delta ~ N(0, s^2)) under h_v^k = (1 + eta_k) h_v^{k-1} + mean_{u in N(v)}
// h_u^{k-1}, identity transform, two layers. Linking m-n directly leaves
// noise A*delta at m, A = 2 + eta1 + eta2. Linking both to a mixup node v
// whose own noise is delta' ~ N(0, c s^2) leaves A*delta' + delta/2, so
//   E|noise via v| / E|noise direct| = sqrt(c + 1 / (4 A^2)).
// The commonly quoted form sqrt(c + 1 / (4 A)) drops the square on A; both
// are reported and the simulation decides which one holds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "intramix/random.hpp"

namespace intramix {

inline constexpr std::size_t kMinTheoremTrials = 100000;

inline double mixing_variance_factor(double lambda) {
  return lambda * lambda + (1.0 - lambda) * (1.0 - lambda);
}

struct NoiseModel {
  std::vector<double> sigma_per_class{1.0};
  double feature_sigma = 1.0;

  void validate() const {
    if (sigma_per_class.empty()) throw std::invalid_argument("NoiseModel: no classes");
    for (double s : sigma_per_class) {
      if (!(s > 0.0)) throw std::invalid_argument("NoiseModel: sigmas must be positive");
    }
    if (!(feature_sigma > 0.0)) {
      throw std::invalid_argument("NoiseModel: feature_sigma must be positive");
    }
  }
};

struct Theorem1Closed {
  double prob = 0.0;
  double ratio = 0.0;
};

inline Theorem1Closed closed_form_theorem1(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("closed_form_theorem1: lambda must lie in [0, 1]");
  }
  const double root_c = std::sqrt(mixing_variance_factor(lambda));
  return {2.0 / std::numbers::pi * std::atan(1.0 / root_c), root_c};
}

struct Theorem1Estimate {
  double prob = 0.0;
  double ratio = 0.0;
  double prob_radius = 0.0;   // 3 standard errors
  double ratio_radius = 0.0;  // 3 standard errors (delta method)
};

struct Theorem1Report {
  std::vector<Theorem1Estimate> per_class;
  Theorem1Estimate pooled;  // unweighted mean over classes
};

/// Monte-Carlo estimate of both label-noise quantities, `trials` draws per
/// class. Class i uses the stream split(i) of the seed.
inline Theorem1Report mc_theorem1(double lambda, const NoiseModel& noise, std::size_t trials,
                                  std::uint64_t seed) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("mc_theorem1: lambda must lie in [0, 1]");
  }
  if (trials < kMinTheoremTrials) {
    throw std::invalid_argument("mc_theorem1: need at least 100000 trials");
  }
  noise.validate();
  const CounterRng root(seed);
  const auto n = static_cast<double>(trials);
  Theorem1Report report;
  double prob_var_sum = 0.0;
  double ratio_var_sum = 0.0;
  for (std::size_t c = 0; c < noise.sigma_per_class.size(); ++c) {
    const double sigma = noise.sigma_per_class[c];
    CounterRng rng = root.split(c);
    std::size_t hits = 0;
    double sum_a = 0.0, sum_b = 0.0, sum_aa = 0.0, sum_bb = 0.0, sum_ab = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const double e1 = sigma * rng.normal();
      const double e2 = sigma * rng.normal();
      const double e = sigma * rng.normal();
      const double a = std::abs(lambda * e1 + (1.0 - lambda) * e2);
      const double b = std::abs(e1);
      hits += a < std::abs(e);
      sum_a += a;
      sum_b += b;
      sum_aa += a * a;
      sum_bb += b * b;
      sum_ab += a * b;
    }
    Theorem1Estimate est;
    est.prob = static_cast<double>(hits) / n;
    const double mean_a = sum_a / n;
    const double mean_b = sum_b / n;
    est.ratio = mean_a / mean_b;
    const double var_a = sum_aa / n - mean_a * mean_a;
    const double var_b = sum_bb / n - mean_b * mean_b;
    const double cov = sum_ab / n - mean_a * mean_b;
    const double r = est.ratio;
    const double ratio_var =
        (var_a - 2.0 * r * cov + r * r * var_b) / (mean_b * mean_b) / n;
    const double prob_var = est.prob * (1.0 - est.prob) / n;
    est.prob_radius = 3.0 * std::sqrt(prob_var);
    est.ratio_radius = 3.0 * std::sqrt(std::max(0.0, ratio_var));
    prob_var_sum += prob_var;
    ratio_var_sum += std::max(0.0, ratio_var);
    report.per_class.push_back(est);
  }
  const auto k = static_cast<double>(report.per_class.size());
  for (const auto& est : report.per_class) {
    report.pooled.prob += est.prob / k;
    report.pooled.ratio += est.ratio / k;
  }
  report.pooled.prob_radius = 3.0 * std::sqrt(prob_var_sum) / k;
  report.pooled.ratio_radius = 3.0 * std::sqrt(ratio_var_sum) / k;
  return report;
}

struct LinearGnnConfig {
  double eta1 = 0.0;
  double eta2 = 0.0;
  double lambda = 0.5;
  std::size_t trials = 1000000;
  std::uint64_t seed = 0;
  double signal = 1.0;  // noise-free feature shared by the class

  double depth_gain() const { return 2.0 + eta1 + eta2; }

  void validate() const {
    if (!(depth_gain() > 0.0)) {
      throw std::invalid_argument("LinearGnnConfig: 2 + eta1 + eta2 must be positive");
    }
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      throw std::invalid_argument("LinearGnnConfig: lambda must lie in [0, 1]");
    }
  }
};

struct Theorem2Closed {
  double ratio_printed = 0.0;     // sqrt(c + 1 / (4 A))
  double ratio_derivation = 0.0;  // sqrt(c + 1 / (4 A^2))
};

inline Theorem2Closed closed_form_theorem2(const LinearGnnConfig& cfg) {
  cfg.validate();
  const double c = mixing_variance_factor(cfg.lambda);
  const double a = cfg.depth_gain();
  return {std::sqrt(c + 1.0 / (4.0 * a)), std::sqrt(c + 1.0 / (4.0 * a * a))};
}

enum class Theorem2Verdict { kPrinted, kDerivation, kBoth, kNeither };

constexpr std::string_view to_string(Theorem2Verdict v) {
  switch (v) {
    case Theorem2Verdict::kPrinted: return "printed";
    case Theorem2Verdict::kDerivation: return "derivation";
    case Theorem2Verdict::kBoth: return "both";
    case Theorem2Verdict::kNeither: return "neither";
  }
  return "?";
}

struct Theorem2Estimate {
  double ratio = 0.0;
  double radius = 0.0;  // 3 standard errors (delta method)
  Theorem2Closed closed;
  Theorem2Verdict verdict = Theorem2Verdict::kNeither;
  double tolerance = 0.0;
};

/// Scalar two-layer propagation h^k_v = (1 + eta_k) h^{k-1}_v + mean of the
/// neighbours' h^{k-1}, on an adjacency list. Returns h^2.
inline std::vector<double> propagate_two_layers(const std::vector<std::vector<int>>& adjacency,
                                                std::vector<double> h, double eta1,
                                                double eta2) {
  for (double eta : {eta1, eta2}) {
    std::vector<double> next(h.size());
    for (std::size_t v = 0; v < h.size(); ++v) {
      double mean = 0.0;
      for (int u : adjacency[v]) mean += h[static_cast<std::size_t>(u)];
      if (!adjacency[v].empty()) mean /= static_cast<double>(adjacency[v].size());
      next[v] = (1.0 + eta) * h[v] + mean;
    }
    h = std::move(next);
  }
  return h;
}

/// Simulates both wirings and compares E|noise at m| between them. Node 0 is
/// m, node 1 is n, node 2 (wiring b only) is the mixup node built from two
/// fresh noisy members of the class.
inline Theorem2Estimate mc_theorem2(const LinearGnnConfig& cfg, const NoiseModel& noise,
                                    double tolerance = 0.01) {
  cfg.validate();
  noise.validate();
  if (cfg.trials < kMinTheoremTrials) {
    throw std::invalid_argument("mc_theorem2: need at least 100000 trials");
  }
  const std::vector<std::vector<int>> direct{{1}, {0}};
  const std::vector<std::vector<int>> bridged{{2}, {2}, {0, 1}};
  const double mu = cfg.signal;
  const double sigma = noise.feature_sigma;
  const double lambda = cfg.lambda;
  const double clean_direct = propagate_two_layers(direct, {mu, mu}, cfg.eta1, cfg.eta2)[0];
  const double clean_bridged =
      propagate_two_layers(bridged, {mu, mu, mu}, cfg.eta1, cfg.eta2)[0];

  CounterRng rng(cfg.seed);
  const auto n = static_cast<double>(cfg.trials);
  double sum_a = 0.0, sum_b = 0.0, sum_aa = 0.0, sum_bb = 0.0, sum_ab = 0.0;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const double x_n = mu + sigma * rng.normal();
    const double x_p = mu + sigma * rng.normal();
    const double x_q = mu + sigma * rng.normal();
    const double x_v = lambda * x_p + (1.0 - lambda) * x_q;
    const double noise_direct =
        propagate_two_layers(direct, {mu, x_n}, cfg.eta1, cfg.eta2)[0] - clean_direct;
    const double noise_bridged =
        propagate_two_layers(bridged, {mu, x_n, x_v}, cfg.eta1, cfg.eta2)[0] - clean_bridged;
    const double a = std::abs(noise_bridged);
    const double b = std::abs(noise_direct);
    sum_a += a;
    sum_b += b;
    sum_aa += a * a;
    sum_bb += b * b;
    sum_ab += a * b;
  }
  Theorem2Estimate est;
  const double mean_a = sum_a / n;
  const double mean_b = sum_b / n;
  est.ratio = mean_a / mean_b;
  const double r = est.ratio;
  const double var_a = sum_aa / n - mean_a * mean_a;
  const double var_b = sum_bb / n - mean_b * mean_b;
  const double cov = sum_ab / n - mean_a * mean_b;
  est.radius =
      3.0 * std::sqrt(std::max(0.0, (var_a - 2.0 * r * cov + r * r * var_b) / (mean_b * mean_b) / n));
  est.closed = closed_form_theorem2(cfg);
  est.tolerance = tolerance;
  const bool printed = std::abs(est.ratio - est.closed.ratio_printed) <= tolerance;
  const bool derived = std::abs(est.ratio - est.closed.ratio_derivation) <= tolerance;
  est.verdict = printed && derived ? Theorem2Verdict::kBoth
                : printed          ? Theorem2Verdict::kPrinted
                : derived          ? Theorem2Verdict::kDerivation
                                   : Theorem2Verdict::kNeither;
  return est;
}

}  // namespace intramix

#endif  // INTRAMIX_THEORY_HPP_
