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


#ifndef INTRAMIX_REPORT_HPP_
#define INTRAMIX_REPORT_HPP_

// JSON views of the experiment records. Wall-clock figures never appear in
// these objects; callers collect them under a top-level "timing" key so that
// stripping that key leaves a byte-stable report.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "intramix/augment.hpp"
#include "intramix/experiment.hpp"
#include "intramix/gcn.hpp"
#include "intramix/pseudo_label.hpp"
#include "intramix/theory.hpp"

namespace intramix {

using Json = nlohmann::ordered_json;

inline Json to_json(const TrainConfig& c) {
  return {{"hidden", c.hidden_dim},     {"layers", c.num_layers}, {"lr", c.learning_rate},
          {"weight_decay", c.weight_decay}, {"dropout", c.dropout}, {"epochs", c.max_epochs},
          {"patience", c.patience}};
}

inline Json to_json(const LambdaLaw& law) {
  if (law.kind == LambdaLaw::Kind::kFixed) return {{"kind", "fixed"}, {"value", law.value}};
  return {{"kind", "beta"}, {"alpha", law.alpha}, {"beta", law.beta}};
}

inline Json to_json(const PipelineConfig& c) {
  return {{"train", to_json(c.train)},
          {"ensemble_dropouts", c.ensemble.dropout_probs},
          {"strategy", strategy_name(c.augment.strategy)},
          {"nodes_per_class", c.augment.nodes_per_class},
          {"lambda", to_json(c.augment.lambda)},
          {"pseudo_label_noise", c.pseudo_label_noise}};
}

inline Json to_json(const AugmentationReport& r) {
  Json hist = Json::object();
  for (const auto& [uses, count] : r.anchor_usage_histogram) hist[std::to_string(uses)] = count;
  Json j = {{"strategy", strategy_name(r.strategy)},
            {"generated_per_class", r.generated_per_class},
            {"skipped_classes", r.skipped_classes},
            {"unwired_nodes", r.unwired_nodes},
            {"single_anchor_nodes", r.single_anchor_nodes},
            {"anchor_usage_histogram", hist},
            {"new_edges", r.new_edges},
            {"pseudo_labels_added", r.pseudo_labels_added}};
  if (r.edge_audit) {
    j["edge_audit"] = {{"new_edges", r.edge_audit->new_edges},
                       {"same_class", r.edge_audit->same_class},
                       {"same_class_fraction", r.edge_audit->same_class_fraction()}};
  }
  return j;
}

inline Json to_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.stddev}}; }

inline Json to_json(const Theorem1Estimate& e) {
  return {{"prob", e.prob},
          {"prob_radius", e.prob_radius},
          {"ratio", e.ratio},
          {"ratio_radius", e.ratio_radius}};
}

inline Json to_json(const Theorem2Estimate& e) {
  return {{"ratio", e.ratio},
          {"radius", e.radius},
          {"closed_printed", e.closed.ratio_printed},
          {"closed_derivation", e.closed.ratio_derivation},
          {"tolerance", e.tolerance},
          {"verdict", to_string(e.verdict)}};
}

/// Per-seed record of a paired baseline / augmented run.
inline Json run_record(const BaselineStage& base, const StrategyOutcome& out) {
  return {{"seed", base.seed},
          {"baseline_accuracy", base.test_accuracy},
          {"augmented_accuracy", out.test_accuracy},
          {"pseudo_labels", base.pseudo_count},
          {"pseudo_label_accuracy", base.pseudo_accuracy},
          {"high_quality_pseudo", base.high_quality_count},
          {"high_quality_accuracy", base.high_quality_accuracy},
          {"baseline_best_epoch", base.model.best_epoch},
          {"augmented_best_epoch", out.best_epoch},
          {"train_mask_size", out.train_mask_size},
          {"num_nodes", out.num_nodes},
          {"edge_count", out.edge_count},
          {"test_mask_digest", out.test_mask_digest},
          {"augmentation", to_json(out.report)}};
}

inline Json timing_record(const BaselineStage& base, const StrategyOutcome& out) {
  return {{"seed", base.seed},
          {"train", base.train_seconds},
          {"inference", base.inference_seconds},
          {"generation", out.generation_seconds},
          {"wiring", out.wiring_seconds},
          {"retrain", out.train_seconds}};
}

}  // namespace intramix

#endif  // INTRAMIX_REPORT_HPP_
