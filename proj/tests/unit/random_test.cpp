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

#include "intramix/random.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

namespace intramix {
namespace {

double chi_square_p_value(const std::vector<double>& observed, double expected) {
  double stat = 0.0;
  for (double o : observed) stat += (o - expected) * (o - expected) / expected;
  boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

TEST(CounterRng, SameSeedSameStream) {
  CounterRng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(CounterRng, OutputIsMixedCounter) {
  CounterRng r(9);
  const std::uint64_t key = r.key();
  EXPECT_EQ(r(), mix64(key + 1 * 0x9E3779B97F4A7C15ULL));
  EXPECT_EQ(r(), mix64(key + 2 * 0x9E3779B97F4A7C15ULL));
  EXPECT_EQ(r.counter(), 2u);
}

TEST(CounterRng, SplitDoesNotAdvanceParent) {
  CounterRng a(5), b(5);
  (void)a.split(3);
  EXPECT_EQ(a(), b());
}

TEST(CounterRng, SplitStreamsDiffer) {
  const CounterRng root(1);
  CounterRng x = root.split(1), y = root.split(2), z = root.split(1);
  const auto vx = x(), vy = y(), vz = z();
  EXPECT_NE(vx, vy);
  EXPECT_EQ(vx, vz);
}

TEST(CounterRng, UniformInUnitInterval) {
  CounterRng r(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(CounterRng, UniformIndexIsUniform) {
  CounterRng r(11);
  std::vector<double> counts(7, 0.0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) counts[r.uniform_index(7)] += 1.0;
  EXPECT_GT(chi_square_p_value(counts, n / 7.0), 0.001);
  EXPECT_THROW(r.uniform_index(0), std::invalid_argument);
}

TEST(CounterRng, NormalMoments) {
  CounterRng r(17);
  const int n = 200000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    ss += x * x;
  }
  const double mean = s / n;
  const double var = ss / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(var, 1.0, 5.0 * std::sqrt(2.0 / n));
}

TEST(CounterRng, GammaMeanMatchesShape) {
  for (double shape : {0.5, 2.0, 7.5}) {
    CounterRng r(23);
    const int n = 100000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += r.gamma(shape);
    EXPECT_NEAR(s / n, shape, 5.0 * std::sqrt(shape / n)) << "shape " << shape;
  }
}

TEST(CounterRng, BetaTwoTwoMean) {
  CounterRng r(29);
  const int n = 10000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.beta(2.0, 2.0);
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, 1.0);
    s += x;
  }
  EXPECT_GE(s / n, 0.49);
  EXPECT_LE(s / n, 0.51);
}

TEST(CounterRng, BetaAsymmetricMean) {
  CounterRng r(31);
  const int n = 100000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += r.beta(2.0, 5.0);
  EXPECT_NEAR(s / n, 2.0 / 7.0, 0.005);
}

TEST(CounterRng, SampleWithoutReplacementIsDistinct) {
  CounterRng r(37);
  const auto picks = r.sample_without_replacement(50, 20);
  ASSERT_EQ(picks.size(), 20u);
  std::set<std::uint64_t> unique(picks.begin(), picks.end());
  EXPECT_EQ(unique.size(), 20u);
  for (auto p : picks) EXPECT_LT(p, 50u);
  EXPECT_THROW(r.sample_without_replacement(3, 4), std::invalid_argument);
}

TEST(CounterRng, DistinctPairIsUniformOverOrderedPairs) {
  CounterRng r(41);
  std::vector<double> counts(4 * 3, 0.0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    const auto [a, b] = r.distinct_pair(4);
    ASSERT_NE(a, b);
    counts[a * 3 + (b > a ? b - 1 : b)] += 1.0;
  }
  EXPECT_GT(chi_square_p_value(counts, n / 12.0), 0.001);
  EXPECT_THROW(r.distinct_pair(1), std::invalid_argument);
}

TEST(CounterRng, ShuffleIsPermutation) {
  CounterRng r(43);
  std::vector<int> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i;
  auto w = v;
  r.shuffle(w);
  EXPECT_NE(v, w);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(v, w);
}

}  // namespace
}  // namespace intramix
