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


#include "intramix/metrics.hpp"

#include <gtest/gtest.h>

#include "intramix/dataset.hpp"
#include "intramix/random.hpp"

namespace intramix {
namespace {

TEST(Accuracy, Cases) {
  const std::vector<ClassId> pred{0, 1, 2, 1};
  const std::vector<ClassId> truth{0, 1, 1, 0};
  const std::vector<NodeId> all{0, 1, 2, 3};
  const std::vector<NodeId> first{0, 1};
  const std::vector<NodeId> wrong{2, 3};
  EXPECT_DOUBLE_EQ(accuracy(pred, truth, all), 0.5);
  EXPECT_DOUBLE_EQ(accuracy(pred, truth, first), 1.0);
  EXPECT_DOUBLE_EQ(accuracy(pred, truth, wrong), 0.0);
  EXPECT_THROW(accuracy(pred, truth, std::vector<NodeId>{}), std::invalid_argument);
}

TEST(MadGap, IdenticalRowsGiveZero) {
  const Graph g = build_graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
  Matrix e(6, 3);
  e.rowwise() = RowVector{{1.0, 2.0, 3.0}};
  EXPECT_NEAR(madgap(e, g, MadGapConfig{}).value, 0.0, 1e-12);
}

TEST(MadGap, ConstructedCase) {
  HopClasses c(3);
  c.set(0, 1, HopClass::kNear);
  c.set(0, 2, HopClass::kFar);
  c.set(1, 2, HopClass::kFar);
  const Matrix e{{1.0, 0.0}, {2.0, 0.0}, {0.0, 3.0}};
  const auto r = madgap(e, c);
  EXPECT_DOUBLE_EQ(r.value, 1.0);
  EXPECT_EQ(r.near_pairs, 1u);
  EXPECT_EQ(r.far_pairs, 2u);
  EXPECT_DOUBLE_EQ(madgap(e, c.swapped()).value, -1.0);
}

TEST(MadGap, ZeroRowsExcluded) {
  HopClasses c(4);
  c.set(0, 1, HopClass::kNear);
  c.set(0, 2, HopClass::kFar);
  c.set(0, 3, HopClass::kFar);
  c.set(1, 3, HopClass::kNear);
  const Matrix e{{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}};
  const auto r = madgap(e, c);
  EXPECT_EQ(r.zero_rows, std::vector<NodeId>{3});
  EXPECT_EQ(r.near_pairs, 1u);
  EXPECT_EQ(r.far_pairs, 1u);
  EXPECT_DOUBLE_EQ(r.value, 1.0);
}

TEST(MadGap, RequiresBothPairKinds) {
  HopClasses c(2);
  c.set(0, 1, HopClass::kNear);
  EXPECT_THROW(madgap(Matrix::Identity(2, 2), c), std::invalid_argument);
  EXPECT_THROW(madgap(Matrix::Identity(1, 2), c), std::invalid_argument);
  EXPECT_THROW(madgap(Matrix::Identity(2, 2), build_graph(2, {}), MadGapConfig{3, 3}),
               std::invalid_argument);
}

TEST(MadGap, MatchesBruteForce) {
  SbmConfig cfg;
  cfg.num_classes = 2;
  cfg.nodes_per_class = 10;
  cfg.p_intra = 0.2;
  cfg.p_inter = 0.05;
  cfg.feature_dim = 4;
  cfg.seed = 12;
  const auto s = generate_sbm(cfg);
  const Graph& g = s.graph;
  const Matrix& x = s.table.features;
  const std::size_t n = g.num_nodes();

  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, kUnreachable));
  for (NodeId i = 0; i < n; ++i) {
    d[i][i] = 0;
    for (NodeId j : g.neighbors(i)) d[i][j] = 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (d[i][k] != kUnreachable && d[k][j] != kUnreachable) {
          d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
        }
      }
    }
  }
  double near = 0, far = 0, nn = 0, nf = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double cosine = x.row(i).dot(x.row(j)) / (x.row(i).norm() * x.row(j).norm());
      if (d[i][j] <= 2) {
        near += 1 - cosine;
        nn += 1;
      } else if (d[i][j] >= 4) {
        far += 1 - cosine;
        nf += 1;
      }
    }
  }
  ASSERT_GT(nn, 0);
  ASSERT_GT(nf, 0);
  EXPECT_NEAR(madgap(x, g, MadGapConfig{}).value, far / nf - near / nn, 1e-12);
}

}  // namespace
}  // namespace intramix
