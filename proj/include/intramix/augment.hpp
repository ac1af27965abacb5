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

#ifndef INTRAMIX_AUGMENT_HPP_
#define INTRAMIX_AUGMENT_HPP_

// Node synthesis and wiring.
//
// Intra-class mixup draws two distinct labeled nodes (gold or pseudo) that
// share a label c and emits x = lambda * x_i + (1 - lambda) * x_j with label
// c. Each generated node is then linked to two distinct high-quality nodes of
// class c, sampled uniformly per generated node (an anchor may serve many
// generated nodes). Generated nodes are appended after the original nodes.
//
// The ablation strategies swap out one of those two steps; see Strategy.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "intramix/dataset.hpp"
#include "intramix/gcn.hpp"
#include "intramix/graph.hpp"
#include "intramix/random.hpp"

namespace intramix {

enum class Strategy {
  kIntraMix,         // intra-class mixup, wired to two high-quality same-class nodes
  kMixupNoCon,       // inter-class mixup, no edges
  kMixupWithCon,     // inter-class mixup, wired to its parents
  kMixupSimCon,      // inter-class mixup, wired to the two most cosine-similar rows
  kDirectCon,        // intra-class mixup, wired to its parents
  kRandomCon,        // intra-class mixup, wired to two random original nodes
  kWithoutCon,       // intra-class mixup, no edges
  kZeros,            // intramix wiring, all-zero features
  kOnes,             // intramix wiring, all-one features
  kPseudoLabelOnly,  // nothing generated; pseudo-labeled nodes join training
};

inline constexpr Strategy kAllStrategies[] = {
    Strategy::kIntraMix,   Strategy::kMixupNoCon, Strategy::kMixupWithCon,
    Strategy::kMixupSimCon, Strategy::kDirectCon, Strategy::kRandomCon,
    Strategy::kWithoutCon, Strategy::kZeros,      Strategy::kOnes,
    Strategy::kPseudoLabelOnly,
};

constexpr std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kIntraMix: return "intramix";
    case Strategy::kMixupNoCon: return "mixup_no_con";
    case Strategy::kMixupWithCon: return "mixup_w_con";
    case Strategy::kMixupSimCon: return "mixup_sim_con";
    case Strategy::kDirectCon: return "direct_con";
    case Strategy::kRandomCon: return "random_con";
    case Strategy::kWithoutCon: return "without_con";
    case Strategy::kZeros: return "zeros";
    case Strategy::kOnes: return "ones";
    case Strategy::kPseudoLabelOnly: return "pl_only";
  }
  return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view name) {
  for (Strategy s : kAllStrategies) {
    if (strategy_name(s) == name) return s;
  }
  return std::nullopt;
}

constexpr bool is_vanilla_mixup(Strategy s) {
  return s == Strategy::kMixupNoCon || s == Strategy::kMixupWithCon ||
         s == Strategy::kMixupSimCon;
}

struct LambdaLaw {
  enum class Kind { kBeta, kFixed };
  Kind kind = Kind::kBeta;
  double alpha = 2.0;
  double beta = 2.0;
  double value = 0.5;

  static LambdaLaw beta_law(double a, double b) { return {Kind::kBeta, a, b, 0.5}; }
  static LambdaLaw fixed(double v) { return {Kind::kFixed, 2.0, 2.0, v}; }

  void validate() const {
    if (kind == Kind::kFixed && !(value >= 0.0 && value <= 1.0)) {
      throw std::invalid_argument("LambdaLaw: fixed lambda must lie in [0, 1]");
    }
    if (kind == Kind::kBeta && !(alpha > 0.0 && beta > 0.0)) {
      throw std::invalid_argument("LambdaLaw: beta parameters must be > 0");
    }
  }

  double sample(CounterRng& rng) const {
    return kind == Kind::kFixed ? value : rng.beta(alpha, beta);
  }
};

struct AugmentationConfig {
  std::size_t nodes_per_class = 30;
  LambdaLaw lambda;
  Strategy strategy = Strategy::kIntraMix;
  std::uint64_t seed = 0;

  void validate() const { lambda.validate(); }
};

struct GeneratedBatch {
  Matrix features;
  std::vector<ClassId> labels;                     // hard label stored in the table
  Matrix soft_targets;                             // training target per generated node
  std::vector<std::pair<NodeId, NodeId>> parents;  // (weighted by lambda, by 1 - lambda)
  std::vector<double> lambdas;
  std::vector<ClassId> skipped_classes;            // fewer than two labeled nodes

  std::size_t size() const noexcept { return labels.size(); }
};

namespace detail {

inline bool is_mixup_source(const NodeTable& t, NodeId i) {
  return t.labels[i].has_value() && t.provenance[i] != Provenance::kGenerated;
}

inline void reserve_batch(GeneratedBatch& b, std::size_t count, std::size_t dim,
                          std::size_t classes) {
  b.features = Matrix::Zero(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  b.soft_targets =
      Matrix::Zero(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(classes));
  b.labels.reserve(count);
  b.parents.reserve(count);
  b.lambdas.reserve(count);
}

}  // namespace detail

/// Intra-class mixup: `nodes_per_class` nodes for every class that has at
/// least two labeled (gold or pseudo) nodes. Classes short of parents are
/// listed in skipped_classes; if every class is short this throws.
inline GeneratedBatch mixup_generate(const NodeTable& table, const AugmentationConfig& cfg) {
  cfg.validate();
  CounterRng rng = CounterRng(cfg.seed).split(streams::kMixup);
  std::vector<std::vector<NodeId>> pools(static_cast<std::size_t>(table.num_classes));
  for (NodeId i = 0; i < table.num_nodes(); ++i) {
    if (detail::is_mixup_source(table, i)) {
      pools[static_cast<std::size_t>(*table.labels[i])].push_back(i);
    }
  }
  GeneratedBatch batch;
  std::size_t eligible = 0;
  for (const auto& pool : pools) eligible += pool.size() >= 2;
  if (eligible == 0) {
    throw std::invalid_argument("mixup_generate: no class has two labeled nodes to mix");
  }
  detail::reserve_batch(batch, eligible * cfg.nodes_per_class, table.feature_dim(),
                        static_cast<std::size_t>(table.num_classes));
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < pools.size(); ++c) {
    const auto& pool = pools[c];
    if (pool.size() < 2) {
      batch.skipped_classes.push_back(static_cast<ClassId>(c));
      continue;
    }
    for (std::size_t k = 0; k < cfg.nodes_per_class; ++k, ++row) {
      const auto [a, b] = rng.distinct_pair(pool.size());
      const NodeId i = pool[a];
      const NodeId j = pool[b];
      const double lambda = cfg.lambda.sample(rng);
      batch.features.row(row) = lambda * table.features.row(i) + (1.0 - lambda) * table.features.row(j);
      batch.labels.push_back(static_cast<ClassId>(c));
      batch.soft_targets(row, static_cast<Eigen::Index>(c)) = 1.0;
      batch.parents.emplace_back(i, j);
      batch.lambdas.push_back(lambda);
    }
  }
  return batch;
}

/// Inter-class ("vanilla") mixup over all labeled nodes, regardless of
/// label. The soft label lambda * e_i + (1 - lambda) * e_j is kept for
/// training; its argmax (lowest index on ties) is the stored label.
inline GeneratedBatch vanilla_mixup_generate(const NodeTable& table,
                                             const AugmentationConfig& cfg) {
  cfg.validate();
  CounterRng rng = CounterRng(cfg.seed).split(streams::kMixup);
  std::vector<NodeId> pool;
  for (NodeId i = 0; i < table.num_nodes(); ++i) {
    if (detail::is_mixup_source(table, i)) pool.push_back(i);
  }
  if (pool.size() < 2) {
    throw std::invalid_argument("vanilla_mixup_generate: need two labeled nodes to mix");
  }
  const std::size_t count = cfg.nodes_per_class * static_cast<std::size_t>(table.num_classes);
  GeneratedBatch batch;
  detail::reserve_batch(batch, count, table.feature_dim(),
                        static_cast<std::size_t>(table.num_classes));
  for (std::size_t k = 0; k < count; ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    const auto [a, b] = rng.distinct_pair(pool.size());
    const NodeId i = pool[a];
    const NodeId j = pool[b];
    const double lambda = cfg.lambda.sample(rng);
    batch.features.row(row) = lambda * table.features.row(i) + (1.0 - lambda) * table.features.row(j);
    batch.soft_targets(row, *table.labels[i]) += lambda;
    batch.soft_targets(row, *table.labels[j]) += 1.0 - lambda;
    Eigen::Index hard = 0;
    for (Eigen::Index c = 1; c < batch.soft_targets.cols(); ++c) {
      if (batch.soft_targets(row, c) > batch.soft_targets(row, hard)) hard = c;
    }
    batch.labels.push_back(static_cast<ClassId>(hard));
    batch.parents.emplace_back(i, j);
    batch.lambdas.push_back(lambda);
  }
  return batch;
}

/// Per generated node, the original nodes it is linked to.
using AnchorLists = std::vector<std::vector<NodeId>>;

struct WiringResult {
  Graph graph;
  AnchorLists anchors;
  std::vector<std::size_t> unwired;       // batch rows with no anchor available
  std::size_t single_anchor = 0;          // batch rows linked to one anchor only
};

/// `graph` extended by the batch (appended after the original nodes) and one
/// edge per (generated node, anchor) pair.
inline Graph attach_generated(const Graph& graph, std::size_t batch_size,
                              const AnchorLists& anchors) {
  const std::size_t base = graph.num_nodes();
  std::vector<Edge> edges = graph.edges();
  for (std::size_t g = 0; g < anchors.size(); ++g) {
    for (NodeId a : anchors[g]) edges.push_back({a, static_cast<NodeId>(base + g)});
  }
  return build_graph(base + batch_size, edges);
}

/// Links each generated node to two distinct high-quality nodes of its own
/// class among the original nodes of `graph`; one link if the class has a
/// single such node; none (reported) if it has zero.
inline WiringResult wire_neighbors(const GeneratedBatch& batch, const NodeTable& table,
                                   const Graph& graph, const AugmentationConfig& cfg) {
  CounterRng rng = CounterRng(cfg.seed).split(streams::kWiring);
  std::vector<std::vector<NodeId>> pools(static_cast<std::size_t>(table.num_classes));
  for (NodeId i = 0; i < graph.num_nodes(); ++i) {
    if (table.provenance.at(i) == Provenance::kHighQuality && table.labels[i]) {
      pools[static_cast<std::size_t>(*table.labels[i])].push_back(i);
    }
  }
  WiringResult out;
  out.anchors.resize(batch.size());
  for (std::size_t g = 0; g < batch.size(); ++g) {
    const auto& pool = pools.at(static_cast<std::size_t>(batch.labels[g]));
    if (pool.size() >= 2) {
      const auto [a, b] = rng.distinct_pair(pool.size());
      out.anchors[g] = {pool[a], pool[b]};
    } else if (pool.size() == 1) {
      out.anchors[g] = {pool[0]};
      ++out.single_anchor;
    } else {
      out.unwired.push_back(g);
    }
  }
  out.graph = attach_generated(graph, batch.size(), out.anchors);
  return out;
}

/// Label audit of new edges against ground truth of the original nodes.
struct EdgeAudit {
  std::size_t new_edges = 0;
  std::size_t same_class = 0;

  double same_class_fraction() const {
    return new_edges ? static_cast<double>(same_class) / static_cast<double>(new_edges) : 0.0;
  }
};

struct AugmentationReport {
  Strategy strategy = Strategy::kIntraMix;
  std::vector<std::size_t> generated_per_class;
  std::vector<ClassId> skipped_classes;
  std::vector<std::size_t> unwired_nodes;
  std::size_t single_anchor_nodes = 0;
  std::map<std::size_t, std::size_t> anchor_usage_histogram;  // uses -> anchor count
  std::size_t new_edges = 0;
  std::size_t pseudo_labels_added = 0;
  std::optional<EdgeAudit> edge_audit;
};

struct AugmentedData {
  Graph graph;
  NodeTable table;
  std::vector<NodeId> train_mask;
  Matrix train_targets;  // one row per train_mask entry
  GeneratedBatch batch;
  AnchorLists anchors;
  std::size_t num_original = 0;
  AugmentationReport report;
  double generation_seconds = 0.0;
  double wiring_seconds = 0.0;
};

/// Appends the batch to `table` with the generated tag.
inline NodeTable append_generated(const NodeTable& table, const GeneratedBatch& batch) {
  NodeTable out = table;
  const auto n = static_cast<Eigen::Index>(table.num_nodes());
  const auto m = static_cast<Eigen::Index>(batch.size());
  out.features.conservativeResize(n + m, Eigen::NoChange);
  if (m > 0) out.features.bottomRows(m) = batch.features;
  for (ClassId y : batch.labels) {
    out.labels.emplace_back(y);
    out.provenance.push_back(Provenance::kGenerated);
  }
  return out;
}

/// split.train, plus every generated node, plus (when `include_pseudo`) every
/// pseudo-labeled original node. Ascending, duplicate-free.
inline std::vector<NodeId> augmented_train_mask(const NodeTable& table, const SplitMasks& split,
                                                bool include_pseudo = false) {
  std::vector<NodeId> mask = split.train;
  for (NodeId i = 0; i < table.num_nodes(); ++i) {
    const Provenance p = table.provenance[i];
    if (p == Provenance::kGenerated) {
      mask.push_back(i);
    } else if (include_pseudo && (p == Provenance::kPseudo || p == Provenance::kHighQuality)) {
      mask.push_back(i);
    }
  }
  std::sort(mask.begin(), mask.end());
  mask.erase(std::unique(mask.begin(), mask.end()), mask.end());
  return mask;
}

namespace detail {

inline AnchorLists parent_anchors(const GeneratedBatch& batch) {
  AnchorLists out;
  for (const auto& [i, j] : batch.parents) out.push_back({i, j});
  return out;
}

inline AnchorLists random_anchors(std::size_t count, std::size_t num_original, CounterRng& rng) {
  AnchorLists out;
  for (std::size_t g = 0; g < count; ++g) {
    if (num_original >= 2) {
      const auto [a, b] = rng.distinct_pair(num_original);
      out.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b)});
    } else {
      out.emplace_back(num_original, 0);
    }
  }
  return out;
}

/// Two original rows with the highest cosine similarity; lowest index wins ties.
inline AnchorLists similar_anchors(const GeneratedBatch& batch, const Matrix& original) {
  AnchorLists out;
  const Eigen::VectorXd norms = original.rowwise().norm();
  for (std::size_t g = 0; g < batch.size(); ++g) {
    const auto x = batch.features.row(static_cast<Eigen::Index>(g));
    const double xn = x.norm();
    std::vector<std::pair<double, NodeId>> scored;
    scored.reserve(static_cast<std::size_t>(original.rows()));
    for (Eigen::Index i = 0; i < original.rows(); ++i) {
      const double denom = xn * norms(i);
      const double sim = denom > 0.0 ? original.row(i).dot(x) / denom : 0.0;
      scored.emplace_back(-sim, static_cast<NodeId>(i));
    }
    const std::size_t k = std::min<std::size_t>(2, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k),
                      scored.end());
    std::vector<NodeId> top;
    for (std::size_t t = 0; t < k; ++t) top.push_back(scored[t].second);
    out.push_back(std::move(top));
  }
  return out;
}

inline std::map<std::size_t, std::size_t> usage_histogram(const AnchorLists& anchors) {
  std::map<NodeId, std::size_t> uses;
  for (const auto& list : anchors) {
    for (NodeId a : list) ++uses[a];
  }
  std::map<std::size_t, std::size_t> hist;
  for (const auto& [node, count] : uses) ++hist[count];
  return hist;
}

}  // namespace detail

/// Runs one strategy on a pseudo-labeled table whose high-quality tags are
/// already assigned. Returns the augmented graph and table, the training
/// mask, and per-row training targets (soft for inter-class mixup).
inline AugmentedData apply_strategy(const Graph& graph, const NodeTable& table,
                                    const SplitMasks& split, const AugmentationConfig& cfg) {
  cfg.validate();
  if (graph.num_nodes() != table.num_nodes()) {
    throw std::invalid_argument("apply_strategy: graph and table node counts differ");
  }
  AugmentedData out;
  out.num_original = graph.num_nodes();
  out.report.strategy = cfg.strategy;
  out.report.generated_per_class.assign(static_cast<std::size_t>(table.num_classes), 0);

  const Strategy s = cfg.strategy;
  if (s == Strategy::kPseudoLabelOnly) {
    out.graph = graph;
    out.table = table;
    out.train_mask = augmented_train_mask(table, split, true);
    out.report.pseudo_labels_added = out.train_mask.size() - split.train.size();
  } else {
    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    out.batch = is_vanilla_mixup(s) ? vanilla_mixup_generate(table, cfg)
                                    : mixup_generate(table, cfg);
    out.report.skipped_classes = out.batch.skipped_classes;
    if (s == Strategy::kZeros) out.batch.features.setZero();
    if (s == Strategy::kOnes) out.batch.features.setOnes();
    const auto t1 = Clock::now();

    switch (s) {
      case Strategy::kIntraMix:
      case Strategy::kZeros:
      case Strategy::kOnes: {
        auto wiring = wire_neighbors(out.batch, table, graph, cfg);
        out.graph = std::move(wiring.graph);
        out.anchors = std::move(wiring.anchors);
        out.report.unwired_nodes = std::move(wiring.unwired);
        out.report.single_anchor_nodes = wiring.single_anchor;
        break;
      }
      case Strategy::kDirectCon:
      case Strategy::kMixupWithCon:
        out.anchors = detail::parent_anchors(out.batch);
        break;
      case Strategy::kRandomCon: {
        CounterRng rng = CounterRng(cfg.seed).split(streams::kWiring);
        out.anchors = detail::random_anchors(out.batch.size(), graph.num_nodes(), rng);
        break;
      }
      case Strategy::kMixupSimCon:
        out.anchors = detail::similar_anchors(out.batch, table.features);
        break;
      case Strategy::kMixupNoCon:
      case Strategy::kWithoutCon:
      case Strategy::kPseudoLabelOnly:
        out.anchors.assign(out.batch.size(), {});
        break;
    }
    if (out.graph.num_nodes() == 0) {
      out.graph = attach_generated(graph, out.batch.size(), out.anchors);
    }
    const auto t2 = Clock::now();
    out.generation_seconds = std::chrono::duration<double>(t1 - t0).count();
    out.wiring_seconds = std::chrono::duration<double>(t2 - t1).count();
    out.table = append_generated(table, out.batch);
    out.train_mask = augmented_train_mask(out.table, split, false);
    for (ClassId y : out.batch.labels) ++out.report.generated_per_class[static_cast<std::size_t>(y)];
  }

  out.report.new_edges = out.graph.edge_count() - graph.edge_count();
  out.report.anchor_usage_histogram = detail::usage_histogram(out.anchors);

  const auto labels = label_vector(out.table);
  out.train_targets = one_hot_targets(labels, out.train_mask,
                                      static_cast<std::size_t>(table.num_classes));
  for (std::size_t k = 0; k < out.train_mask.size(); ++k) {
    const NodeId i = out.train_mask[k];
    if (i >= out.num_original) {
      out.train_targets.row(static_cast<Eigen::Index>(k)) =
          out.batch.soft_targets.row(static_cast<Eigen::Index>(i - out.num_original));
    }
  }
  return out;
}

/// Fraction of new edges whose original endpoint's true class equals the
/// generated endpoint's stored label.
inline EdgeAudit audit_new_edges(const AugmentedData& aug, std::span<const ClassId> truth) {
  EdgeAudit audit;
  for (std::size_t g = 0; g < aug.anchors.size(); ++g) {
    for (NodeId a : aug.anchors[g]) {
      ++audit.new_edges;
      audit.same_class += truth[a] == aug.batch.labels[g];
    }
  }
  return audit;
}

/// Label-noise magnitude of a batch against ground truth. A node's noise is
/// ||e_observed - q||_2 / sqrt(2), where q is its true label distribution:
/// e_t for an original node, lambda * e_t1 + (1 - lambda) * e_t2 for a mixed
/// one. A flipped hard label scores 1, a correct one 0.
struct MixupNoiseAudit {
  double generated_noise = 0.0;  // mean over generated nodes
  double source_noise = 0.0;     // mean over every parent occurrence
  double generated_error_rate = 0.0;  // argmax(q) != stored label
  double source_error_rate = 0.0;
};

inline MixupNoiseAudit audit_mixup_label_noise(const GeneratedBatch& batch,
                                               std::span<const ClassId> parent_labels,
                                               std::span<const ClassId> truth) {
  MixupNoiseAudit out;
  if (batch.size() == 0) return out;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t g = 0; g < batch.size(); ++g) {
    const auto [i, j] = batch.parents[g];
    const double lambda = batch.lambdas[g];
    const ClassId c = batch.labels[g];
    std::map<ClassId, double> q;
    q[truth[i]] += lambda;
    q[truth[j]] += 1.0 - lambda;
    double sq = 0.0;
    bool has_c = false;
    ClassId top = q.begin()->first;
    for (const auto& [k, mass] : q) {
      const double diff = (k == c ? 1.0 : 0.0) - mass;
      sq += diff * diff;
      has_c |= k == c;
      if (mass > q[top]) top = k;
    }
    if (!has_c) sq += 1.0;
    out.generated_noise += std::sqrt(sq) * inv_sqrt2;
    out.generated_error_rate += top != c;
    out.source_noise += (parent_labels[i] != truth[i]) + (parent_labels[j] != truth[j]);
  }
  const auto m = static_cast<double>(batch.size());
  out.generated_noise /= m;
  out.generated_error_rate /= m;
  out.source_noise /= 2.0 * m;
  out.source_error_rate = out.source_noise;
  return out;
}

}  // namespace intramix

#endif  // INTRAMIX_AUGMENT_HPP_
