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

#ifndef INTRAMIX_GCN_HPP_
#define INTRAMIX_GCN_HPP_

// Graph convolutional network with hand-written backpropagation.
//
// Layer l computes Z_l = A_hat (drop(H_l) W_l) + b_l, with H_0 = X and
// H_{l+1} = relu(Z_l); the last Z is the logit matrix. Dropout is inverted:
// kept entries are scaled by 1 / (1 - p) during training so inference needs
// no rescaling, and p = 0 takes exactly the inference path.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "intramix/dataset.hpp"
#include "intramix/graph.hpp"
#include "intramix/random.hpp"

namespace intramix {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  std::size_t hidden_dim = 64;
  std::size_t num_layers = 2;
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  double dropout = 0.5;
  std::size_t max_epochs = 200;
  std::size_t patience = 100;
  std::uint64_t seed = 0;

  void validate() const {
    if (hidden_dim == 0) throw std::invalid_argument("TrainConfig: hidden_dim must be > 0");
    if (num_layers == 0) throw std::invalid_argument("TrainConfig: num_layers must be > 0");
    if (!(learning_rate > 0.0)) {
      throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    }
    if (!(weight_decay >= 0.0)) {
      throw std::invalid_argument("TrainConfig: weight_decay must be >= 0");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) {
      throw std::invalid_argument("TrainConfig: dropout must lie in [0, 1)");
    }
    if (max_epochs == 0) throw std::invalid_argument("TrainConfig: max_epochs must be > 0");
    if (patience > max_epochs) {
      throw std::invalid_argument("TrainConfig: patience must not exceed max_epochs");
    }
  }
};

struct ModelParams {
  std::vector<Matrix> weights;
  std::vector<RowVector> biases;

  std::size_t num_layers() const noexcept { return weights.size(); }
  std::size_t input_dim() const { return static_cast<std::size_t>(weights.front().rows()); }
  std::size_t num_classes() const { return static_cast<std::size_t>(weights.back().cols()); }

  ModelParams zeros_like() const {
    ModelParams z;
    for (const auto& w : weights) z.weights.push_back(Matrix::Zero(w.rows(), w.cols()));
    for (const auto& b : biases) z.biases.push_back(RowVector::Zero(b.size()));
    return z;
  }

  bool all_finite() const {
    for (const auto& w : weights) {
      if (!w.allFinite()) return false;
    }
    for (const auto& b : biases) {
      if (!b.allFinite()) return false;
    }
    return true;
  }

  friend bool operator==(const ModelParams& a, const ModelParams& b) {
    if (a.weights.size() != b.weights.size() || a.biases.size() != b.biases.size()) return false;
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
      if (a.weights[l].rows() != b.weights[l].rows() ||
          a.weights[l].cols() != b.weights[l].cols() || a.weights[l] != b.weights[l]) {
        return false;
      }
      if (a.biases[l].size() != b.biases[l].size() || a.biases[l] != b.biases[l]) return false;
    }
    return true;
  }
};

/// Layer widths [input, hidden..., classes] for a `num_layers`-deep stack.
inline std::vector<std::size_t> layer_dims(std::size_t input_dim, std::size_t hidden_dim,
                                           std::size_t num_classes, std::size_t num_layers) {
  std::vector<std::size_t> dims{input_dim};
  for (std::size_t l = 1; l < num_layers; ++l) dims.push_back(hidden_dim);
  dims.push_back(num_classes);
  return dims;
}

/// Glorot-uniform weights, zero biases.
inline ModelParams glorot_init(std::span<const std::size_t> dims, CounterRng& rng) {
  ModelParams p;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const auto fan_in = static_cast<Eigen::Index>(dims[l]);
    const auto fan_out = static_cast<Eigen::Index>(dims[l + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_in, fan_out);
    for (Eigen::Index i = 0; i < fan_in; ++i) {
      for (Eigen::Index j = 0; j < fan_out; ++j) w(i, j) = limit * (2.0 * rng.uniform() - 1.0);
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(RowVector::Zero(fan_out));
  }
  return p;
}

struct ForwardTrace {
  /// Non-owning; must outlive the trace when it is fed to loss_and_grad.
  const NormalizedAdjacency* adjacency = nullptr;
  std::vector<Matrix> layer_inputs;    // drop(H_l), the matrix multiplied by W_l
  std::vector<Matrix> dropout_scales;  // 0 or 1/(1-p) per entry; empty when p == 0
  std::vector<Matrix> pre_activations; // Z_l of the hidden layers
  std::vector<Matrix> hidden;          // relu(Z_l) of the hidden layers
  Matrix logits;

  /// Last hidden layer, the input to the classifier layer.
  const Matrix& embeddings() const {
    if (hidden.empty()) throw std::logic_error("ForwardTrace: model has no hidden layer");
    return hidden.back();
  }

  Matrix probabilities() const {
    Matrix p = logits;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      const double mx = p.row(i).maxCoeff();
      p.row(i) = (p.row(i).array() - mx).exp();
      p.row(i) /= p.row(i).sum();
    }
    return p;
  }
};

inline ForwardTrace forward(const ModelParams& params, const NormalizedAdjacency& adj,
                            const Matrix& features, double dropout, CounterRng& rng) {
  if (params.num_layers() == 0) throw std::invalid_argument("forward: empty model");
  if (static_cast<std::size_t>(features.rows()) != adj.num_nodes()) {
    throw std::invalid_argument("forward: feature rows do not match the graph");
  }
  if (static_cast<std::size_t>(features.cols()) != params.input_dim()) {
    throw std::invalid_argument("forward: feature width does not match the model");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw std::invalid_argument("forward: dropout must lie in [0, 1)");
  }
  ForwardTrace trace;
  trace.adjacency = &adj;
  const double keep_scale = 1.0 / (1.0 - dropout);
  Matrix h = features;
  for (std::size_t l = 0; l < params.num_layers(); ++l) {
    if (dropout > 0.0) {
      Matrix scales(h.rows(), h.cols());
      for (Eigen::Index i = 0; i < scales.rows(); ++i) {
        for (Eigen::Index j = 0; j < scales.cols(); ++j) {
          scales(i, j) = rng.uniform() < dropout ? 0.0 : keep_scale;
        }
      }
      h = h.cwiseProduct(scales);
      trace.dropout_scales.push_back(std::move(scales));
    } else {
      trace.dropout_scales.emplace_back();
    }
    Matrix z = adj.multiply(h * params.weights[l]);
    z.rowwise() += params.biases[l];
    trace.layer_inputs.push_back(std::move(h));
    if (!z.allFinite()) {
      throw NumericalError("forward: non-finite values in layer " + std::to_string(l + 1));
    }
    if (l + 1 == params.num_layers()) {
      trace.logits = std::move(z);
    } else {
      h = z.cwiseMax(0.0);
      trace.hidden.push_back(h);
      trace.pre_activations.push_back(std::move(z));
    }
  }
  return trace;
}

struct LossAndGrad {
  double loss = 0.0;
  ModelParams grads;
};

/// Mean cross-entropy over `mask` against soft targets (one row per masked
/// node, rows summing to one), and its gradient through the cached trace.
inline LossAndGrad loss_and_grad(const ModelParams& params, const ForwardTrace& trace,
                                 const Matrix& targets, std::span<const NodeId> mask) {
  if (mask.empty()) throw std::invalid_argument("loss_and_grad: empty mask");
  if (trace.adjacency == nullptr) throw std::invalid_argument("loss_and_grad: trace has no graph");
  if (static_cast<std::size_t>(targets.rows()) != mask.size() ||
      targets.cols() != trace.logits.cols()) {
    throw std::invalid_argument("loss_and_grad: targets shape mismatch");
  }
  const double inv_count = 1.0 / static_cast<double>(mask.size());
  LossAndGrad out;
  out.grads = params.zeros_like();

  Matrix dz = Matrix::Zero(trace.logits.rows(), trace.logits.cols());
  for (std::size_t k = 0; k < mask.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(mask[k]);
    const auto kk = static_cast<Eigen::Index>(k);
    const auto row = trace.logits.row(i);
    const double mx = row.maxCoeff();
    const double log_z = mx + std::log((row.array() - mx).exp().sum());
    out.loss -= (targets.row(kk).array() * (row.array() - log_z)).sum();
    dz.row(i) = ((row.array() - log_z).exp().matrix() - targets.row(kk)) * inv_count;
  }
  out.loss *= inv_count;

  const auto& adj = *trace.adjacency;
  for (std::size_t l = params.num_layers(); l-- > 0;) {
    const Matrix g = adj.multiply(dz);
    out.grads.weights[l].noalias() = trace.layer_inputs[l].transpose() * g;
    out.grads.biases[l] = dz.colwise().sum();
    if (l == 0) break;
    Matrix dh = g * params.weights[l].transpose();
    if (trace.dropout_scales[l].size() != 0) dh = dh.cwiseProduct(trace.dropout_scales[l]);
    const Matrix& z = trace.pre_activations[l - 1];
    dz = (z.array() > 0.0).select(dh.array(), 0.0).matrix();
  }
  return out;
}

/// One-hot targets for `mask` from per-node labels.
inline Matrix one_hot_targets(std::span<const ClassId> labels, std::span<const NodeId> mask,
                              std::size_t num_classes) {
  Matrix t = Matrix::Zero(static_cast<Eigen::Index>(mask.size()),
                          static_cast<Eigen::Index>(num_classes));
  for (std::size_t k = 0; k < mask.size(); ++k) {
    const ClassId y = labels[mask[k]];
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
      throw std::invalid_argument("one_hot_targets: node " + std::to_string(mask[k]) +
                                  " has no valid label");
    }
    t(static_cast<Eigen::Index>(k), y) = 1.0;
  }
  return t;
}

inline LossAndGrad loss_and_grad(const ModelParams& params, const ForwardTrace& trace,
                                 std::span<const ClassId> labels, std::span<const NodeId> mask) {
  if (mask.empty()) throw std::invalid_argument("loss_and_grad: empty mask");
  return loss_and_grad(params, trace, one_hot_targets(labels, mask, params.num_classes()), mask);
}

/// Row argmax; ties go to the lowest class index.
inline std::vector<ClassId> argmax_rows(const Matrix& logits) {
  std::vector<ClassId> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < logits.cols(); ++c) {
      if (logits(i, c) > logits(i, best)) best = c;
    }
    out[static_cast<std::size_t>(i)] = static_cast<ClassId>(best);
  }
  return out;
}

inline std::vector<ClassId> predict(const ModelParams& params, const NormalizedAdjacency& adj,
                                    const Matrix& features, double dropout, CounterRng& rng) {
  return argmax_rows(forward(params, adj, features, dropout, rng).logits);
}

/// Dropout stays active when `dropout` > 0, so repeated calls with distinct
/// probabilities act as an ensemble of one trained model.
inline std::vector<ClassId> predict(const ModelParams& params, const Graph& graph,
                                    const NodeTable& table, double dropout, CounterRng& rng) {
  const auto adj = normalized_adjacency(graph);
  return predict(params, adj, table.features, dropout, rng);
}

/// What the trainer fits and early-stops on.
struct Supervision {
  std::vector<NodeId> train_nodes;
  Matrix train_targets;  // one row per train node
  std::vector<NodeId> val_nodes;
  std::vector<ClassId> val_labels;  // aligned with val_nodes
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainResult {
  ModelParams params;  // best-validation parameters
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_val_accuracy = 0.0;
};

class AdamOptimizer {
 public:
  AdamOptimizer(const ModelParams& like, double lr, double weight_decay)
      : m_(like.zeros_like()), v_(like.zeros_like()), lr_(lr), weight_decay_(weight_decay) {}

  /// Coupled L2: weight_decay * W is added to weight gradients (not biases).
  void step(ModelParams& params, const ModelParams& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t l = 0; l < params.num_layers(); ++l) {
      const Matrix g = grads.weights[l] + weight_decay_ * params.weights[l];
      update(params.weights[l].array(), g.array(), m_.weights[l].array(), v_.weights[l].array(),
             c1, c2);
      update(params.biases[l].array(), grads.biases[l].array(), m_.biases[l].array(),
             v_.biases[l].array(), c1, c2);
    }
  }

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

 private:
  template <typename P, typename G, typename M>
  void update(P&& p, const G& g, M&& m, M&& v, double c1, double c2) {
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v = kBeta2 * v + (1.0 - kBeta2) * g.square();
    p -= lr_ * (m / c1) / ((v / c2).sqrt() + kEpsilon);
  }

  ModelParams m_;
  ModelParams v_;
  double lr_;
  double weight_decay_;
  std::size_t t_ = 0;
};

namespace detail {

inline double masked_accuracy(const Matrix& logits, std::span<const NodeId> nodes,
                              std::span<const ClassId> labels) {
  if (nodes.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto row = logits.row(nodes[k]);
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < row.size(); ++c) {
      if (row(c) > row(best)) best = c;
    }
    hits += best == labels[k];
  }
  return static_cast<double>(hits) / static_cast<double>(nodes.size());
}

inline double masked_loss(const Matrix& logits, std::span<const NodeId> nodes,
                          std::span<const ClassId> labels) {
  if (nodes.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto row = logits.row(nodes[k]);
    const double mx = row.maxCoeff();
    total += mx + std::log((row.array() - mx).exp().sum()) - row(labels[k]);
  }
  return total / static_cast<double>(nodes.size());
}

}  // namespace detail

/// Full-batch Adam with early stopping on validation accuracy (validation
/// loss breaks ties). Returns the best-validation parameters.
inline TrainResult train(const Graph& graph, const Matrix& features, const Supervision& sup,
                         const TrainConfig& cfg) {
  cfg.validate();
  if (sup.train_nodes.empty()) throw std::invalid_argument("train: empty training set");
  if (static_cast<std::size_t>(sup.train_targets.rows()) != sup.train_nodes.size()) {
    throw std::invalid_argument("train: targets do not match training nodes");
  }
  if (sup.val_labels.size() != sup.val_nodes.size()) {
    throw std::invalid_argument("train: validation labels do not match nodes");
  }
  const auto adj = normalized_adjacency(graph);
  const CounterRng root(cfg.seed);
  CounterRng init_rng = root.split(streams::kInit);
  CounterRng dropout_rng = root.split(streams::kDropout);
  CounterRng eval_rng = root;  // unused at dropout 0

  const auto num_classes = static_cast<std::size_t>(sup.train_targets.cols());
  const auto dims = layer_dims(static_cast<std::size_t>(features.cols()), cfg.hidden_dim,
                               num_classes, cfg.num_layers);
  ModelParams params = glorot_init(dims, init_rng);
  AdamOptimizer adam(params, cfg.learning_rate, cfg.weight_decay);

  std::vector<ClassId> train_hard(sup.train_nodes.size());
  for (std::size_t k = 0; k < train_hard.size(); ++k) {
    Eigen::Index c = 0;
    sup.train_targets.row(static_cast<Eigen::Index>(k)).maxCoeff(&c);
    train_hard[k] = static_cast<ClassId>(c);
  }

  TrainResult result;
  result.params = params;
  double best_acc = -1.0;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const ForwardTrace trace = forward(params, adj, features, cfg.dropout, dropout_rng);
    const LossAndGrad lg = loss_and_grad(params, trace, sup.train_targets, sup.train_nodes);
    adam.step(params, lg.grads);
    if (!params.all_finite()) {
      throw NumericalError("train: non-finite parameters after epoch " + std::to_string(epoch));
    }

    const Matrix logits = forward(params, adj, features, 0.0, eval_rng).logits;
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = lg.loss;
    rec.train_accuracy = detail::masked_accuracy(logits, sup.train_nodes, train_hard);
    rec.val_accuracy = detail::masked_accuracy(logits, sup.val_nodes, sup.val_labels);
    rec.val_loss = detail::masked_loss(logits, sup.val_nodes, sup.val_labels);
    result.history.push_back(rec);

    if (rec.val_accuracy > best_acc || (rec.val_accuracy == best_acc && rec.val_loss < best_loss)) {
      best_acc = rec.val_accuracy;
      best_loss = rec.val_loss;
      result.params = params;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  result.best_val_accuracy = best_acc;
  return result;
}

/// Supervision from hard labels in `table` (train) and `val_labels`.
inline Supervision make_supervision(const NodeTable& table, std::span<const NodeId> train_nodes,
                                    std::span<const NodeId> val_nodes,
                                    std::span<const ClassId> val_labels) {
  Supervision sup;
  sup.train_nodes.assign(train_nodes.begin(), train_nodes.end());
  sup.train_targets = one_hot_targets(label_vector(table), train_nodes,
                                      static_cast<std::size_t>(table.num_classes));
  sup.val_nodes.assign(val_nodes.begin(), val_nodes.end());
  sup.val_labels.assign(val_labels.begin(), val_labels.end());
  return sup;
}

/// Trains on split.train with validation labels read from `table`.
inline TrainResult train(const Graph& graph, const NodeTable& table, const SplitMasks& split,
                         const TrainConfig& cfg) {
  const auto labels = label_vector(table);
  std::vector<ClassId> val_labels;
  for (NodeId i : split.validation) {
    if (labels.at(i) < 0) {
      throw std::invalid_argument("train: validation node " + std::to_string(i) +
                                  " has no label");
    }
    val_labels.push_back(labels[i]);
  }
  return train(graph, table.features, make_supervision(table, split.train, split.validation,
                                                       val_labels),
               cfg);
}

// Checkpoint: {"format": "intramix-gcn-v1", "layers": [{"rows", "cols",
// "weight": row-major, "bias"}]}.

inline nlohmann::ordered_json checkpoint_json(const ModelParams& params) {
  nlohmann::ordered_json j;
  j["format"] = "intramix-gcn-v1";
  j["layers"] = nlohmann::ordered_json::array();
  for (std::size_t l = 0; l < params.num_layers(); ++l) {
    const Matrix& w = params.weights[l];
    nlohmann::ordered_json layer;
    layer["rows"] = w.rows();
    layer["cols"] = w.cols();
    layer["weight"] = std::vector<double>(w.data(), w.data() + w.size());
    layer["bias"] = std::vector<double>(params.biases[l].data(),
                                        params.biases[l].data() + params.biases[l].size());
    j["layers"].push_back(std::move(layer));
  }
  return j;
}

inline ModelParams params_from_checkpoint(const nlohmann::json& j) {
  if (j.value("format", "") != "intramix-gcn-v1") {
    throw std::runtime_error("checkpoint: unknown format");
  }
  ModelParams p;
  for (const auto& layer : j.at("layers")) {
    const auto rows = layer.at("rows").get<Eigen::Index>();
    const auto cols = layer.at("cols").get<Eigen::Index>();
    const auto w = layer.at("weight").get<std::vector<double>>();
    const auto b = layer.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
        static_cast<Eigen::Index>(b.size()) != cols) {
      throw std::runtime_error("checkpoint: layer shape does not match its data");
    }
    p.weights.push_back(Eigen::Map<const Matrix>(w.data(), rows, cols));
    p.biases.push_back(Eigen::Map<const RowVector>(b.data(), cols));
  }
  if (p.weights.empty()) throw std::runtime_error("checkpoint: no layers");
  for (std::size_t l = 1; l < p.num_layers(); ++l) {
    if (p.weights[l].rows() != p.weights[l - 1].cols()) {
      throw std::runtime_error("checkpoint: inconsistent layer widths");
    }
  }
  return p;
}

inline void save_checkpoint(const std::filesystem::path& path, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << checkpoint_json(params).dump() << '\n';
}

inline ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return params_from_checkpoint(nlohmann::json::parse(in));
}

}  // namespace intramix

#endif  // INTRAMIX_GCN_HPP_
