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


#ifndef INTRAMIX_TESTS_GRADIENT_CHECK_HPP_
#define INTRAMIX_TESTS_GRADIENT_CHECK_HPP_

// Central finite differences against the analytic GCN gradient on small
// random instances.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "intramix/gcn.hpp"
#include "intramix/graph.hpp"
#include "intramix/random.hpp"

namespace intramix::testing {

struct GradientInstance {
  Graph graph;
  Matrix features;
  ModelParams params;
  Matrix targets;
  std::vector<NodeId> mask;
};

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t entries = 0;
};

inline double min_abs_pre_activation(const ModelParams& p, const NormalizedAdjacency& adj,
                                     const Matrix& x) {
  CounterRng unused(0);
  const ForwardTrace t = forward(p, adj, x, 0.0, unused);
  double m = std::numeric_limits<double>::infinity();
  for (const Matrix& z : t.pre_activations) m = std::min(m, z.cwiseAbs().minCoeff());
  return m;
}

/// Random graph, features, soft targets and parameters. Instances whose
/// hidden pre-activations come within `kink_margin` of zero are redrawn so
/// the finite-difference stencil never straddles a ReLU kink.
inline GradientInstance random_gradient_instance(std::uint64_t seed, double kink_margin = 1e-3) {
  CounterRng rng(seed);
  for (;;) {
    GradientInstance g;
    const std::size_t n = 4 + rng.uniform_index(7);
    const std::size_t f = 2 + rng.uniform_index(4);
    const std::size_t hidden = 2 + rng.uniform_index(4);
    const std::size_t classes = 2 + rng.uniform_index(3);
    const std::size_t layers = 1 + rng.uniform_index(3);
    std::vector<Edge> edges;
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        if (rng.bernoulli(0.4)) edges.push_back({i, j});
      }
    }
    g.graph = build_graph(n, edges);
    g.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
    for (Eigen::Index i = 0; i < g.features.size(); ++i) g.features.data()[i] = rng.normal();
    const auto dims = layer_dims(f, hidden, classes, layers);
    g.params = glorot_init(dims, rng);
    for (auto& b : g.params.biases) {
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = 0.1 * rng.normal();
    }
    for (NodeId i = 0; i < n; ++i) {
      if (rng.bernoulli(0.6)) g.mask.push_back(i);
    }
    if (g.mask.empty()) g.mask.push_back(0);
    g.targets = Matrix::Zero(static_cast<Eigen::Index>(g.mask.size()),
                             static_cast<Eigen::Index>(classes));
    for (Eigen::Index r = 0; r < g.targets.rows(); ++r) {
      for (Eigen::Index c = 0; c < g.targets.cols(); ++c) g.targets(r, c) = rng.uniform() + 0.05;
      g.targets.row(r) /= g.targets.row(r).sum();
    }
    const auto adj = normalized_adjacency(g.graph);
    if (layers == 1 || min_abs_pre_activation(g.params, adj, g.features) > kink_margin) {
      return g;
    }
  }
}

inline double instance_loss(const GradientInstance& g, const ModelParams& p,
                            const NormalizedAdjacency& adj) {
  CounterRng unused(0);
  const ForwardTrace t = forward(p, adj, g.features, 0.0, unused);
  return loss_and_grad(p, t, g.targets, g.mask).loss;
}

/// Relative error |a - n| / max(|a|, |n|, floor) over every weight and bias
/// entry, with n the central difference at step h.
inline GradientCheckResult check_gradients(const GradientInstance& g, double h = 1e-5,
                                           double floor = 1e-7) {
  const auto adj = normalized_adjacency(g.graph);
  CounterRng unused(0);
  const ForwardTrace t = forward(g.params, adj, g.features, 0.0, unused);
  const LossAndGrad analytic = loss_and_grad(g.params, t, g.targets, g.mask);

  GradientCheckResult out;
  ModelParams p = g.params;
  auto probe = [&](double& slot, double a) {
    const double saved = slot;
    slot = saved + h;
    const double up = instance_loss(g, p, adj);
    slot = saved - h;
    const double down = instance_loss(g, p, adj);
    slot = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(a), std::abs(numeric), floor});
    out.max_relative_error = std::max(out.max_relative_error, std::abs(a - numeric) / denom);
    ++out.entries;
  };
  for (std::size_t l = 0; l < p.num_layers(); ++l) {
    for (Eigen::Index i = 0; i < p.weights[l].size(); ++i) {
      probe(p.weights[l].data()[i], analytic.grads.weights[l].data()[i]);
    }
    for (Eigen::Index i = 0; i < p.biases[l].size(); ++i) {
      probe(p.biases[l].data()[i], analytic.grads.biases[l].data()[i]);
    }
  }
  return out;
}

}  // namespace intramix::testing

#endif  // INTRAMIX_TESTS_GRADIENT_CHECK_HPP_
