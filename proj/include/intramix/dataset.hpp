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

#ifndef INTRAMIX_DATASET_HPP_
#define INTRAMIX_DATASET_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "intramix/graph.hpp"
#include "intramix/random.hpp"

namespace intramix {

using ClassId = int;

/// Where a node's label came from.
enum class Provenance : std::uint8_t {
  kGold,
  kUnlabeled,
  kPseudo,
  kHighQuality,
  kGenerated,
};

constexpr std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kGold: return "gold";
    case Provenance::kUnlabeled: return "unlabeled";
    case Provenance::kPseudo: return "pseudo";
    case Provenance::kHighQuality: return "high_quality";
    case Provenance::kGenerated: return "generated";
  }
  return "?";
}

/// Features, optional labels and provenance tags, one row per node.
struct NodeTable {
  Matrix features;
  std::vector<std::optional<ClassId>> labels;
  std::vector<Provenance> provenance;
  int num_classes = 0;

  std::size_t num_nodes() const noexcept { return labels.size(); }
  std::size_t feature_dim() const noexcept {
    return static_cast<std::size_t>(features.cols());
  }

  bool is_labeled(NodeId i) const { return labels.at(i).has_value(); }

  /// Nodes carrying `tag`, ascending.
  std::vector<NodeId> nodes_with(Provenance tag) const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < num_nodes(); ++i) {
      if (provenance[i] == tag) out.push_back(i);
    }
    return out;
  }

  /// Throws std::logic_error naming the first violated invariant.
  void validate() const {
    if (static_cast<std::size_t>(features.rows()) != labels.size() ||
        provenance.size() != labels.size()) {
      throw std::logic_error("NodeTable: features/labels/provenance length mismatch");
    }
    if (num_classes <= 0) throw std::logic_error("NodeTable: num_classes must be positive");
    for (NodeId i = 0; i < num_nodes(); ++i) {
      const bool unlabeled = provenance[i] == Provenance::kUnlabeled;
      if (unlabeled == labels[i].has_value()) {
        throw std::logic_error("NodeTable: node " + std::to_string(i) +
                               " has provenance " + std::string(to_string(provenance[i])) +
                               (labels[i] ? " but carries a label" : " but no label"));
      }
      if (labels[i] && (*labels[i] < 0 || *labels[i] >= num_classes)) {
        throw std::logic_error("NodeTable: node " + std::to_string(i) +
                               " label out of range");
      }
    }
  }

  friend bool operator==(const NodeTable& a, const NodeTable& b) {
    return a.num_classes == b.num_classes && a.labels == b.labels &&
           a.provenance == b.provenance && a.features.rows() == b.features.rows() &&
           a.features.cols() == b.features.cols() && a.features == b.features;
  }
};

/// Disjoint train/validation/test index sets over original nodes.
struct SplitMasks {
  std::vector<NodeId> train;
  std::vector<NodeId> validation;
  std::vector<NodeId> test;

  void validate(std::size_t num_original_nodes) const {
    std::vector<std::uint8_t> seen(num_original_nodes, 0);
    for (const auto* mask : {&train, &validation, &test}) {
      for (NodeId i : *mask) {
        if (i >= num_original_nodes) {
          throw std::logic_error("SplitMasks: index " + std::to_string(i) +
                                 " is not an original node");
        }
        if (seen[i]++) {
          throw std::logic_error("SplitMasks: node " + std::to_string(i) +
                                 " appears in more than one mask");
        }
      }
    }
  }

  friend bool operator==(const SplitMasks&, const SplitMasks&) = default;
};

/// The triple stored in a container directory.
struct Dataset {
  Graph graph;
  NodeTable table;
  SplitMasks split;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct SbmConfig {
  int num_classes = 5;
  std::size_t nodes_per_class = 300;
  double p_intra = 0.02;
  double p_inter = 0.002;
  std::size_t feature_dim = 20;
  double class_mean_separation = 1.0;
  double feature_noise_sigma = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (num_classes <= 0) throw std::invalid_argument("SbmConfig: num_classes must be > 0");
    if (nodes_per_class == 0) {
      throw std::invalid_argument("SbmConfig: nodes_per_class must be > 0");
    }
    if (feature_dim == 0) throw std::invalid_argument("SbmConfig: feature_dim must be > 0");
    for (double p : {p_intra, p_inter}) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("SbmConfig: edge probabilities must lie in [0, 1]");
      }
    }
    if (!(p_intra > p_inter)) {
      throw std::invalid_argument("SbmConfig: p_intra must exceed p_inter");
    }
    if (!(feature_noise_sigma >= 0.0)) {
      throw std::invalid_argument("SbmConfig: feature_noise_sigma must be >= 0");
    }
  }
};

struct SbmSample {
  Graph graph;
  NodeTable table;                  // every node gold-labeled
  std::vector<ClassId> ground_truth;
};

/// Class c's feature mean: `separation` along axis (c mod feature_dim).
inline RowVector sbm_class_mean(const SbmConfig& cfg, ClassId c) {
  RowVector mean = RowVector::Zero(static_cast<Eigen::Index>(cfg.feature_dim));
  mean(static_cast<Eigen::Index>(static_cast<std::size_t>(c) % cfg.feature_dim)) =
      cfg.class_mean_separation;
  return mean;
}

/// Planted-partition graph with class-conditional Gaussian features. Nodes
/// are laid out class by class. Every unordered pair is an independent
/// Bernoulli trial, visited in (i, j) lexicographic order.
inline SbmSample generate_sbm(const SbmConfig& cfg) {
  cfg.validate();
  const std::size_t n = static_cast<std::size_t>(cfg.num_classes) * cfg.nodes_per_class;
  const CounterRng root(cfg.seed);

  SbmSample out;
  out.ground_truth.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.ground_truth[i] = static_cast<ClassId>(i / cfg.nodes_per_class);
  }

  CounterRng edge_rng = root.split(streams::kGraph);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const double p = out.ground_truth[i] == out.ground_truth[j] ? cfg.p_intra : cfg.p_inter;
      if (edge_rng.bernoulli(p)) edges.push_back({i, j});
    }
  }
  out.graph = build_graph(n, edges);

  CounterRng feature_rng = root.split(streams::kFeatures);
  NodeTable& t = out.table;
  t.num_classes = cfg.num_classes;
  t.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.feature_dim));
  for (std::size_t i = 0; i < n; ++i) {
    const RowVector mean = sbm_class_mean(cfg, out.ground_truth[i]);
    for (std::size_t d = 0; d < cfg.feature_dim; ++d) {
      const auto di = static_cast<Eigen::Index>(d);
      t.features(static_cast<Eigen::Index>(i), di) =
          mean(di) + cfg.feature_noise_sigma * feature_rng.normal();
    }
  }
  t.labels.assign(out.ground_truth.begin(), out.ground_truth.end());
  t.provenance.assign(n, Provenance::kGold);
  return out;
}

/// Stratified split: `labels_per_class` train nodes per class, then
/// `val_size` validation nodes from the shuffled remainder, the rest test.
/// Only gold-labeled nodes are candidates.
inline SplitMasks make_split(const NodeTable& table, std::size_t labels_per_class,
                             std::size_t val_size, std::uint64_t seed) {
  if (labels_per_class == 0) {
    throw std::invalid_argument("make_split: labels_per_class must be > 0");
  }
  CounterRng rng = CounterRng(seed).split(streams::kSplit);
  std::vector<std::vector<NodeId>> by_class(static_cast<std::size_t>(table.num_classes));
  for (NodeId i = 0; i < table.num_nodes(); ++i) {
    if (table.provenance[i] == Provenance::kGold && table.labels[i]) {
      by_class.at(static_cast<std::size_t>(*table.labels[i])).push_back(i);
    }
  }
  SplitMasks split;
  std::vector<NodeId> rest;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& pool = by_class[c];
    if (pool.size() < labels_per_class) {
      throw std::invalid_argument("make_split: class " + std::to_string(c) + " has only " +
                                  std::to_string(pool.size()) + " labeled nodes, need " +
                                  std::to_string(labels_per_class));
    }
    rng.shuffle(pool);
    split.train.insert(split.train.end(), pool.begin(),
                       pool.begin() + static_cast<std::ptrdiff_t>(labels_per_class));
    rest.insert(rest.end(), pool.begin() + static_cast<std::ptrdiff_t>(labels_per_class),
                pool.end());
  }
  std::sort(rest.begin(), rest.end());
  rng.shuffle(rest);
  if (val_size > rest.size()) {
    throw std::invalid_argument("make_split: val_size exceeds remaining nodes");
  }
  split.validation.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(val_size));
  split.test.assign(rest.begin() + static_cast<std::ptrdiff_t>(val_size), rest.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

/// Copy of `table` in which every non-train node is unlabeled. This is the
/// view the augmentation pipeline works on.
inline NodeTable hide_non_train_labels(const NodeTable& table, const SplitMasks& split) {
  NodeTable out = table;
  std::vector<std::uint8_t> in_train(table.num_nodes(), 0);
  for (NodeId i : split.train) in_train.at(i) = 1;
  for (NodeId i = 0; i < out.num_nodes(); ++i) {
    if (!in_train[i]) {
      out.labels[i].reset();
      out.provenance[i] = Provenance::kUnlabeled;
    }
  }
  return out;
}

/// Labels as plain ints, -1 where absent.
inline std::vector<ClassId> label_vector(const NodeTable& table) {
  std::vector<ClassId> out(table.num_nodes(), -1);
  for (NodeId i = 0; i < table.num_nodes(); ++i) {
    if (table.labels[i]) out[i] = *table.labels[i];
  }
  return out;
}

}  // namespace intramix

#endif  // INTRAMIX_DATASET_HPP_
