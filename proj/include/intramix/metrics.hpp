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

#ifndef INTRAMIX_METRICS_HPP_
#define INTRAMIX_METRICS_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "intramix/dataset.hpp"
#include "intramix/graph.hpp"

namespace intramix {

inline double accuracy(std::span<const ClassId> predictions, std::span<const ClassId> truth,
                       std::span<const NodeId> mask) {
  if (mask.empty()) throw std::invalid_argument("accuracy: empty mask");
  std::size_t hits = 0;
  for (NodeId i : mask) hits += predictions[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(mask.size());
}

struct MadGapConfig {
  std::size_t near_max_hops = 2;
  std::size_t far_min_hops = 4;

  void validate() const {
    if (near_max_hops >= far_min_hops) {
      throw std::invalid_argument("MadGapConfig: near_max_hops must be < far_min_hops");
    }
  }
};

struct MadGapResult {
  double value = 0.0;  // mean far distance - mean near distance
  double near_mean = 0.0;
  double far_mean = 0.0;
  std::size_t near_pairs = 0;
  std::size_t far_pairs = 0;
  std::vector<NodeId> zero_rows;  // excluded from every pair
};

/// MADGap over fixed pair classes. Rows of `embeddings` beyond
/// classes.num_nodes() are ignored.
inline MadGapResult madgap(const Matrix& embeddings, const HopClasses& classes) {
  const std::size_t n = classes.num_nodes();
  if (static_cast<std::size_t>(embeddings.rows()) < n) {
    throw std::invalid_argument("madgap: fewer embedding rows than graph nodes");
  }
  MadGapResult out;
  Matrix unit = embeddings.topRows(static_cast<Eigen::Index>(n));
  std::vector<std::uint8_t> usable(n, 1);
  for (NodeId i = 0; i < n; ++i) {
    const double norm = unit.row(i).norm();
    if (norm == 0.0) {
      usable[i] = 0;
      out.zero_rows.push_back(i);
    } else {
      unit.row(i) /= norm;
    }
  }
  double near_sum = 0.0;
  double far_sum = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    if (!usable[i]) continue;
    for (NodeId j = i + 1; j < n; ++j) {
      if (!usable[j]) continue;
      const HopClass c = classes.at(i, j);
      if (c == HopClass::kNeither) continue;
      const double distance = 1.0 - unit.row(i).dot(unit.row(j));
      if (c == HopClass::kNear) {
        near_sum += distance;
        ++out.near_pairs;
      } else {
        far_sum += distance;
        ++out.far_pairs;
      }
    }
  }
  if (out.near_pairs == 0 || out.far_pairs == 0) {
    throw std::invalid_argument("madgap: need at least one near and one far pair");
  }
  out.near_mean = near_sum / static_cast<double>(out.near_pairs);
  out.far_mean = far_sum / static_cast<double>(out.far_pairs);
  out.value = out.far_mean - out.near_mean;
  return out;
}

inline MadGapResult madgap(const Matrix& embeddings, const Graph& graph,
                           const MadGapConfig& cfg) {
  cfg.validate();
  return madgap(embeddings, hop_distance_classes(graph, cfg.near_max_hops, cfg.far_min_hops));
}

}  // namespace intramix

#endif  // INTRAMIX_METRICS_HPP_
