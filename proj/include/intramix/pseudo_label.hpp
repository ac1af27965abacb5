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

#ifndef INTRAMIX_PSEUDO_LABEL_HPP_
#define INTRAMIX_PSEUDO_LABEL_HPP_

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "intramix/dataset.hpp"
#include "intramix/gcn.hpp"
#include "intramix/graph.hpp"
#include "intramix/random.hpp"

namespace intramix {

struct EnsembleConfig {
  std::vector<double> dropout_probs{0.3, 0.4, 0.5, 0.6, 0.7};
  std::uint64_t seed = 0;

  void validate() const {
    if (dropout_probs.empty() || dropout_probs.size() > 16) {
      throw std::invalid_argument("EnsembleConfig: need between 1 and 16 dropout probabilities");
    }
    for (std::size_t i = 0; i < dropout_probs.size(); ++i) {
      const double p = dropout_probs[i];
      if (!(p >= 0.0 && p < 1.0)) {
        throw std::invalid_argument("EnsembleConfig: dropout probabilities must lie in [0, 1)");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (dropout_probs[j] == p) {
          throw std::invalid_argument("EnsembleConfig: dropout probabilities must be distinct");
        }
      }
    }
  }
};

/// Every unlabeled node takes the dropout-free prediction and the pseudo tag.
inline NodeTable assign_pseudo_labels(const ModelParams& model, const Graph& graph,
                                      const NodeTable& table) {
  NodeTable out = table;
  if (out.nodes_with(Provenance::kUnlabeled).empty()) return out;
  CounterRng unused(0);
  const auto pred = predict(model, graph, table, 0.0, unused);
  for (NodeId i = 0; i < out.num_nodes(); ++i) {
    if (out.provenance[i] == Provenance::kUnlabeled) {
      out.labels[i] = pred[i];
      out.provenance[i] = Provenance::kPseudo;
    }
  }
  return out;
}

/// Generator for the ensemble member with dropout `p`. Keyed on the bit
/// pattern of p, so a member draws the same masks whatever list it sits in.
inline CounterRng ensemble_member_rng(const EnsembleConfig& cfg, double p) {
  return CounterRng(cfg.seed).split(streams::kEnsemble).split(std::bit_cast<std::uint64_t>(p));
}

/// One inference pass per dropout probability; no parameter updates. Pseudo
/// nodes whose predictions all agree with their stored label become
/// high_quality; gold nodes become high_quality unconditionally.
inline NodeTable select_high_quality(const ModelParams& model, const Graph& graph,
                                     const NodeTable& table, const EnsembleConfig& cfg) {
  cfg.validate();
  const auto adj = normalized_adjacency(graph);
  std::vector<std::uint8_t> consistent(table.num_nodes(), 1);
  for (double p : cfg.dropout_probs) {
    CounterRng rng = ensemble_member_rng(cfg, p);
    const auto pred = predict(model, adj, table.features, p, rng);
    for (NodeId i = 0; i < table.num_nodes(); ++i) {
      if (!table.labels[i] || pred[i] != *table.labels[i]) consistent[i] = 0;
    }
  }
  NodeTable out = table;
  for (NodeId i = 0; i < out.num_nodes(); ++i) {
    if (out.provenance[i] == Provenance::kGold) {
      out.provenance[i] = Provenance::kHighQuality;
    } else if (out.provenance[i] == Provenance::kPseudo && consistent[i]) {
      out.provenance[i] = Provenance::kHighQuality;
    }
  }
  return out;
}

/// Flips each pseudo label, with probability `rate`, to a uniformly chosen
/// different class. Used to study how mixup treats noisy sources.
inline NodeTable inject_pseudo_label_noise(const NodeTable& table, double rate,
                                           std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw std::invalid_argument("inject_pseudo_label_noise: rate must lie in [0, 1]");
  }
  NodeTable out = table;
  if (out.num_classes < 2) return out;
  CounterRng rng = CounterRng(seed).split(streams::kLabelNoise);
  for (NodeId i = 0; i < out.num_nodes(); ++i) {
    if (out.provenance[i] != Provenance::kPseudo) continue;
    if (!rng.bernoulli(rate)) continue;
    auto shift = static_cast<ClassId>(rng.uniform_index(static_cast<std::uint64_t>(out.num_classes - 1)));
    out.labels[i] = (*out.labels[i] + 1 + shift) % out.num_classes;
  }
  return out;
}

}  // namespace intramix

#endif  // INTRAMIX_PSEUDO_LABEL_HPP_
