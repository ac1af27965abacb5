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

#ifndef INTRAMIX_EXPERIMENT_HPP_
#define INTRAMIX_EXPERIMENT_HPP_

// End-to-end runs: train a baseline, pseudo-label, pick the high-quality set,
// augment, retrain on the augmented graph with the same seed, and score both
// models on the original test mask.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "intramix/augment.hpp"
#include "intramix/dataset.hpp"
#include "intramix/gcn.hpp"
#include "intramix/graph.hpp"
#include "intramix/metrics.hpp"
#include "intramix/pseudo_label.hpp"

namespace intramix {

struct PipelineConfig {
  TrainConfig train;
  EnsembleConfig ensemble;
  AugmentationConfig augment;
  double pseudo_label_noise = 0.0;  // synthetic flips injected into pseudo labels
};

/// The benchmark used throughout the test suites: 5 classes x 300 nodes,
/// 5 gold labels per class, 500 validation nodes.
struct BenchmarkSpec {
  SbmConfig sbm;
  std::size_t labels_per_class = 5;
  std::size_t val_size = 500;
};

inline Dataset make_benchmark(const BenchmarkSpec& spec) {
  SbmSample sample = generate_sbm(spec.sbm);
  Dataset d;
  d.split = make_split(sample.table, spec.labels_per_class, spec.val_size, spec.sbm.seed);
  d.graph = std::move(sample.graph);
  d.table = std::move(sample.table);
  return d;
}

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// 64-bit FNV-1a over the little-endian node ids, as 16 hex digits.
inline std::string mask_digest(std::span<const NodeId> mask) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (NodeId id : mask) {
    for (int b = 0; b < 4; ++b) {
      h ^= (id >> (8 * b)) & 0xFFu;
      h *= 0x100000001B3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Per-run shared state: everything up to and including the high-quality set.
struct BaselineStage {
  std::uint64_t seed = 0;
  TrainResult model;
  double test_accuracy = 0.0;
  NodeTable working;  // non-train labels hidden, then pseudo-labeled and tagged
  std::size_t pseudo_count = 0;
  std::size_t high_quality_count = 0;
  double pseudo_accuracy = 0.0;        // vs ground truth, over pseudo-labeled nodes
  double high_quality_accuracy = 0.0;  // vs ground truth, over high-quality pseudo nodes
  double train_seconds = 0.0;
  double inference_seconds = 0.0;
};

inline TrainConfig with_seed(TrainConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  return cfg;
}

inline std::vector<ClassId> validation_labels(const Dataset& d) {
  const auto truth = label_vector(d.table);
  std::vector<ClassId> out;
  for (NodeId i : d.split.validation) out.push_back(truth.at(i));
  return out;
}

inline BaselineStage run_baseline(const Dataset& d, const PipelineConfig& cfg,
                                  std::uint64_t seed) {
  BaselineStage st;
  st.seed = seed;
  const auto truth = label_vector(d.table);
  const NodeTable hidden = hide_non_train_labels(d.table, d.split);
  const auto val_labels = validation_labels(d);

  auto t0 = Clock::now();
  st.model = train(d.graph, hidden.features,
                   make_supervision(hidden, d.split.train, d.split.validation, val_labels),
                   with_seed(cfg.train, seed));
  st.train_seconds = seconds_since(t0);

  t0 = Clock::now();
  CounterRng unused(seed);
  const auto adj = normalized_adjacency(d.graph);
  const auto pred = predict(st.model.params, adj, hidden.features, 0.0, unused);
  st.test_accuracy = accuracy(pred, truth, d.split.test);

  NodeTable pseudo = assign_pseudo_labels(st.model.params, d.graph, hidden);
  if (cfg.pseudo_label_noise > 0.0) {
    pseudo = inject_pseudo_label_noise(pseudo, cfg.pseudo_label_noise, seed);
  }
  EnsembleConfig ens = cfg.ensemble;
  ens.seed = seed;
  st.working = select_high_quality(st.model.params, d.graph, pseudo, ens);
  st.inference_seconds = seconds_since(t0);

  std::size_t pseudo_hits = 0;
  std::size_t hq_hits = 0;
  for (NodeId i = 0; i < pseudo.num_nodes(); ++i) {
    if (pseudo.provenance[i] != Provenance::kPseudo) continue;
    ++st.pseudo_count;
    const bool hit = *pseudo.labels[i] == truth[i];
    pseudo_hits += hit;
    if (st.working.provenance[i] == Provenance::kHighQuality) {
      ++st.high_quality_count;
      hq_hits += hit;
    }
  }
  if (st.pseudo_count) st.pseudo_accuracy = static_cast<double>(pseudo_hits) / st.pseudo_count;
  if (st.high_quality_count) {
    st.high_quality_accuracy = static_cast<double>(hq_hits) / st.high_quality_count;
  }
  return st;
}

struct StrategyOutcome {
  Strategy strategy = Strategy::kIntraMix;
  double test_accuracy = 0.0;
  std::size_t train_mask_size = 0;
  std::size_t num_nodes = 0;
  std::size_t edge_count = 0;
  std::size_t best_epoch = 0;
  std::string test_mask_digest;
  AugmentationReport report;
  double generation_seconds = 0.0;
  double wiring_seconds = 0.0;
  double train_seconds = 0.0;
  ModelParams params;
  std::optional<Matrix> original_embeddings;  // last hidden layer, original rows
};

/// Augments with `aug` and retrains with the baseline's seed. Test accuracy
/// reads only the original test mask.
inline StrategyOutcome run_strategy(const Dataset& d, const BaselineStage& base,
                                    const PipelineConfig& cfg, AugmentationConfig aug,
                                    bool keep_embeddings = false) {
  aug.seed = base.seed;
  const auto truth = label_vector(d.table);
  AugmentedData data = apply_strategy(d.graph, base.working, d.split, aug);
  data.report.edge_audit = audit_new_edges(data, truth);

  StrategyOutcome out;
  out.strategy = aug.strategy;
  out.report = data.report;
  out.generation_seconds = data.generation_seconds;
  out.wiring_seconds = data.wiring_seconds;
  out.train_mask_size = data.train_mask.size();
  out.num_nodes = data.graph.num_nodes();
  out.edge_count = data.graph.edge_count();

  Supervision sup;
  sup.train_nodes = data.train_mask;
  sup.train_targets = data.train_targets;
  sup.val_nodes = d.split.validation;
  sup.val_labels = validation_labels(d);

  const auto t0 = Clock::now();
  TrainResult model = train(data.graph, data.table.features, sup, with_seed(cfg.train, base.seed));
  out.train_seconds = seconds_since(t0);
  out.best_epoch = model.best_epoch;

  CounterRng unused(base.seed);
  const auto adj = normalized_adjacency(data.graph);
  const ForwardTrace trace = forward(model.params, adj, data.table.features, 0.0, unused);
  const auto pred = argmax_rows(trace.logits);
  for (NodeId i : d.split.test) {
    if (i >= data.num_original) throw std::logic_error("test mask references a generated node");
  }
  out.test_accuracy = accuracy(pred, truth, d.split.test);
  out.test_mask_digest = mask_digest(d.split.test);
  if (keep_embeddings && !trace.hidden.empty()) {
    out.original_embeddings =
        trace.embeddings().topRows(static_cast<Eigen::Index>(data.num_original));
  }
  out.params = std::move(model.params);
  return out;
}

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
};

inline Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

/// MADGap of a depth-`depth` GCN trained on the original graph and on the
/// intramix-augmented graph. Augmentation comes from the 2-layer baseline in
/// `base`; both embeddings are scored on the original nodes with the
/// original graph's hop classes.
struct MadGapPoint {
  std::size_t depth = 0;
  double baseline = 0.0;
  double intramix = 0.0;
  double baseline_test_accuracy = 0.0;
  double intramix_test_accuracy = 0.0;
};

inline MadGapPoint run_madgap_depth(const Dataset& d, const BaselineStage& base,
                                    const PipelineConfig& cfg, const HopClasses& classes,
                                    std::size_t depth) {
  MadGapPoint pt;
  pt.depth = depth;
  PipelineConfig deep = cfg;
  deep.train.num_layers = depth;

  const auto truth = label_vector(d.table);
  const NodeTable hidden = hide_non_train_labels(d.table, d.split);
  const TrainResult plain =
      train(d.graph, hidden.features,
            make_supervision(hidden, d.split.train, d.split.validation, validation_labels(d)),
            with_seed(deep.train, base.seed));
  CounterRng unused(base.seed);
  const auto adj = normalized_adjacency(d.graph);
  const ForwardTrace trace = forward(plain.params, adj, hidden.features, 0.0, unused);
  pt.baseline = madgap(trace.embeddings(), classes).value;
  pt.baseline_test_accuracy = accuracy(argmax_rows(trace.logits), truth, d.split.test);

  AugmentationConfig aug = cfg.augment;
  aug.strategy = Strategy::kIntraMix;
  const StrategyOutcome mixed = run_strategy(d, base, deep, aug, true);
  pt.intramix = madgap(*mixed.original_embeddings, classes).value;
  pt.intramix_test_accuracy = mixed.test_accuracy;
  return pt;
}

}  // namespace intramix

#endif  // INTRAMIX_EXPERIMENT_HPP_
