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

#ifndef INTRAMIX_GRAPH_HPP_
#define INTRAMIX_GRAPH_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace intramix {

using NodeId = std::uint32_t;

/// Row-major dense matrix used for features, weights and activations.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class GraphError : public std::out_of_range {
 public:
  GraphError(const std::string& what, Edge edge)
      : std::out_of_range(what), edge_(edge) {}
  Edge edge() const noexcept { return edge_; }

 private:
  Edge edge_;
};

/// Undirected simple graph in compressed-row form. Each undirected edge is
/// stored in both rows; rows are strictly increasing; no self-loops.
class Graph {
 public:
  Graph() : row_offsets_(1, 0) {}

  std::size_t num_nodes() const noexcept { return row_offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return col_indices_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId node) const {
    return {col_indices_.data() + row_offsets_.at(node),
            col_indices_.data() + row_offsets_.at(node + 1)};
  }
  std::size_t degree(NodeId node) const {
    return row_offsets_.at(node + 1) - row_offsets_.at(node);
  }
  bool has_edge(NodeId u, NodeId v) const {
    if (u >= num_nodes() || v >= num_nodes()) return false;
    const auto row = neighbors(u);
    return std::binary_search(row.begin(), row.end(), v);
  }

  const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
  const std::vector<NodeId>& col_indices() const noexcept { return col_indices_; }

  /// Each undirected edge once, as (u, v) with u < v, in row-major order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId u = 0; u < num_nodes(); ++u) {
      for (NodeId v : neighbors(u)) {
        if (u < v) out.push_back({u, v});
      }
    }
    return out;
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  friend Graph build_graph(std::size_t, std::span<const Edge>);

  std::vector<std::size_t> row_offsets_;
  std::vector<NodeId> col_indices_;
};

inline Graph build_graph(std::size_t num_nodes, std::span<const Edge> edges) {
  if (num_nodes > std::numeric_limits<NodeId>::max()) {
    throw std::invalid_argument("build_graph: node count exceeds NodeId range");
  }
  std::vector<std::pair<NodeId, NodeId>> arcs;
  arcs.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes) {
      throw GraphError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                           ") references a node outside [0, " +
                           std::to_string(num_nodes) + ")",
                       e);
    }
    if (e.u == e.v) continue;
    arcs.emplace_back(e.u, e.v);
    arcs.emplace_back(e.v, e.u);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  Graph g;
  g.row_offsets_.assign(num_nodes + 1, 0);
  g.col_indices_.reserve(arcs.size());
  for (const auto& [u, v] : arcs) {
    ++g.row_offsets_[u + 1];
    g.col_indices_.push_back(v);
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    g.row_offsets_[i + 1] += g.row_offsets_[i];
  }
  return g;
}

inline Graph build_graph(std::size_t num_nodes, std::initializer_list<Edge> edges) {
  return build_graph(num_nodes, std::span<const Edge>(edges.begin(), edges.size()));
}

/// New graph with `new_edges` merged in. Node count is unchanged.
inline Graph add_edges(const Graph& g, std::span<const Edge> new_edges) {
  std::vector<Edge> all = g.edges();
  all.insert(all.end(), new_edges.begin(), new_edges.end());
  return build_graph(g.num_nodes(), all);
}

/// New graph with isolated nodes appended up to `num_nodes` total.
inline Graph with_node_count(const Graph& g, std::size_t num_nodes) {
  if (num_nodes < g.num_nodes()) {
    throw std::invalid_argument("with_node_count: cannot shrink a graph");
  }
  const auto edges = g.edges();
  return build_graph(num_nodes, edges);
}

/// D^-1/2 (A + I) D^-1/2 in CSR form, diagonal included in each row.
struct NormalizedAdjacency {
  std::vector<std::size_t> row_offsets;
  std::vector<NodeId> col_indices;
  std::vector<double> values;

  std::size_t num_nodes() const noexcept { return row_offsets.size() - 1; }

  /// this * dense. The operator is symmetric, so it is also its transpose.
  Matrix multiply(const Matrix& dense) const {
    if (static_cast<std::size_t>(dense.rows()) != num_nodes()) {
      throw std::invalid_argument("NormalizedAdjacency::multiply: row mismatch");
    }
    Matrix out = Matrix::Zero(dense.rows(), dense.cols());
    for (std::size_t i = 0; i < num_nodes(); ++i) {
      auto out_row = out.row(static_cast<Eigen::Index>(i));
      for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
        out_row.noalias() += values[k] * dense.row(col_indices[k]);
      }
    }
    return out;
  }

  Matrix to_dense() const {
    const auto n = static_cast<Eigen::Index>(num_nodes());
    Matrix out = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < num_nodes(); ++i) {
      for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
        out(static_cast<Eigen::Index>(i), col_indices[k]) = values[k];
      }
    }
    return out;
  }
};

inline NormalizedAdjacency normalized_adjacency(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<double> inv_sqrt_degree(n);
  for (NodeId i = 0; i < n; ++i) {
    inv_sqrt_degree[i] = 1.0 / std::sqrt(static_cast<double>(g.degree(i) + 1));
  }
  NormalizedAdjacency adj;
  adj.row_offsets.assign(n + 1, 0);
  adj.col_indices.reserve(g.col_indices().size() + n);
  adj.values.reserve(g.col_indices().size() + n);
  for (NodeId i = 0; i < n; ++i) {
    bool diagonal_done = false;
    auto push = [&](NodeId j) {
      adj.col_indices.push_back(j);
      adj.values.push_back(inv_sqrt_degree[i] * inv_sqrt_degree[j]);
    };
    for (NodeId j : g.neighbors(i)) {
      if (!diagonal_done && j > i) {
        push(i);
        diagonal_done = true;
      }
      push(j);
    }
    if (!diagonal_done) push(i);
    adj.row_offsets[i + 1] = adj.col_indices.size();
  }
  return adj;
}

enum class HopClass : std::uint8_t { kNeither = 0, kNear = 1, kFar = 2 };

/// Dense symmetric pair classification by shortest-path hop count.
/// Unreachable pairs count as far. The diagonal is kNeither.
class HopClasses {
 public:
  HopClasses() = default;
  explicit HopClasses(std::size_t n) : n_(n), cls_(n * n, HopClass::kNeither) {}

  std::size_t num_nodes() const noexcept { return n_; }
  HopClass at(std::size_t i, std::size_t j) const { return cls_.at(i * n_ + j); }
  void set(std::size_t i, std::size_t j, HopClass c) {
    cls_.at(i * n_ + j) = c;
    cls_.at(j * n_ + i) = c;
  }

  /// Near and far labels exchanged.
  HopClasses swapped() const {
    HopClasses out = *this;
    for (auto& c : out.cls_) {
      if (c == HopClass::kNear) {
        c = HopClass::kFar;
      } else if (c == HopClass::kFar) {
        c = HopClass::kNear;
      }
    }
    return out;
  }

 private:
  std::size_t n_ = 0;
  std::vector<HopClass> cls_;
};

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

/// Hop distances from `source` by BFS; unreachable nodes get kUnreachable.
inline std::vector<std::size_t> bfs_distances(const Graph& g, NodeId source) {
  std::vector<std::size_t> dist(g.num_nodes(), kUnreachable);
  std::deque<NodeId> queue{source};
  dist.at(source) = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : g.neighbors(u)) {
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

inline HopClasses hop_distance_classes(const Graph& g, std::size_t near_max,
                                       std::size_t far_min) {
  if (near_max >= far_min) {
    throw std::invalid_argument("hop_distance_classes: near_max must be < far_min");
  }
  const std::size_t n = g.num_nodes();
  HopClasses out(n);
  for (NodeId i = 0; i < n; ++i) {
    const auto dist = bfs_distances(g, i);
    for (NodeId j = i + 1; j < n; ++j) {
      if (dist[j] <= near_max) {
        out.set(i, j, HopClass::kNear);
      } else if (dist[j] >= far_min) {
        out.set(i, j, HopClass::kFar);
      }
    }
  }
  return out;
}

}  // namespace intramix

#endif  // INTRAMIX_GRAPH_HPP_
