// Copyright 2026 The Authors.
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

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "divmax/distance.hpp"
#include "divmax/polytope.hpp"
#include "test_util.hpp"

namespace divmax {
namespace {

using testing::MaskToSet;

Subset All(std::size_t n) {
  Subset s(n);
  std::iota(s.begin(), s.end(), Index{0});
  return s;
}

// min over T ⊆ window, up ∈ T, down ∉ T of r(prefix ∪ T) - x(prefix ∪ T).
double WindowSlackOracle(const MatroidSpec& m, std::span<const double> x, const SlackQuery& q) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t w = q.elements.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << w); ++mask) {
    Subset t;
    for (std::size_t b = 0; b < w; ++b)
      if (mask >> b & 1) t.push_back(q.elements[b]);
    if (!Contains(t, q.up) || (q.down && Contains(t, *q.down))) continue;
    const Subset s = Union(q.prefix, t);
    best = std::min(best, static_cast<double>(m.Rank(s)) - Mass(x, s));
  }
  return best;
}

TEST(SlackMinimize, UniformHalfPoint) {
  const auto m = MatroidSpec::Uniform(4, 2);
  const std::vector<double> x(4, 0.5);
  const auto r = SlackMinimize(m, x, SlackQuery{{}, All(4), 0, 1});
  EXPECT_DOUBLE_EQ(r.min_slack, 0.5);
  EXPECT_EQ(r.argmin, (Subset{0}));
}

TEST(SlackMinimize, IntegralWindowHasTightSet) {
  const auto m = MatroidSpec::Uniform(4, 2);
  const std::vector<double> x = {1, 0, 1, 0};
  EXPECT_DOUBLE_EQ(SlackMinimize(m, x, SlackQuery{{}, All(4), 0, 1}).min_slack, 0.0);
}

TEST(SlackMinimize, RejectsMalformedQueries) {
  const auto m = MatroidSpec::Uniform(4, 2);
  const std::vector<double> x(4, 0.5);
  EXPECT_THROW(SlackMinimize(m, x, SlackQuery{{}, {1, 2}, 0, 1}), InvalidInput);
  EXPECT_THROW(SlackMinimize(m, x, SlackQuery{{}, {0, 2}, 0, 1}), InvalidInput);
  EXPECT_THROW(SlackMinimize(m, x, SlackQuery{{}, {0, 2}, 0, 0}), InvalidInput);
  const auto big = MatroidSpec::Graphic(2, std::vector<std::pair<std::size_t, std::size_t>>(
                                               21, {0, 1}));
  EXPECT_THROW(SlackMinimize(big, std::vector<double>(21, 0.0), SlackQuery{{}, All(21), 0, 1}),
               InvalidInput);
}

// Closed forms and enumeration agree with the direct window oracle; the
// reported argmin attains the reported slack.
TEST(SlackMinimize, MatchesWindowOracle) {
  CounterRng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    const MatroidSpec m = trial % 3 == 0   ? testing::RandomUniform(rng, n)
                          : trial % 3 == 1 ? testing::RandomPartition(rng, n)
                                           : testing::RandomBinaryMatroid(rng, n, 2 + rng() % 3);
    const auto x = testing::RandomBasePoint(rng, m, 1 + rng() % 4);
    SlackQuery q;
    for (Index e = 0; e < n; ++e) {
      const auto side = rng() % 3;
      if (side == 0) q.prefix.push_back(e);
      if (side >= 1) q.elements.push_back(e);
    }
    if (q.elements.size() < 2) continue;
    q.up = q.elements[rng() % q.elements.size()];
    do q.down = q.elements[rng() % q.elements.size()];
    while (*q.down == q.up);
    if (trial % 5 == 0) q.down.reset();
    const auto r = SlackMinimize(m, x, q);
    EXPECT_NEAR(r.min_slack, WindowSlackOracle(m, x, q), 1e-12) << "trial " << trial;
    const Subset s = Union(q.prefix, r.argmin);
    EXPECT_NEAR(static_cast<double>(m.Rank(s)) - Mass(x, s), r.min_slack, 1e-12);
    EXPECT_TRUE(Contains(r.argmin, q.up));
    if (q.down) EXPECT_FALSE(Contains(r.argmin, *q.down));
  }
}

TEST(MaxFeasibleStep, HandValues) {
  const auto m = MatroidSpec::Uniform(4, 2);
  EXPECT_DOUBLE_EQ(
      MaxFeasibleStep(m, std::vector<double>(4, 0.5), SlackQuery{{}, All(4), 0, 1}).epsilon, 0.5);
  EXPECT_DOUBLE_EQ(
      MaxFeasibleStep(m, std::vector<double>{0.5, 0, 1, 0.5}, SlackQuery{{}, All(4), 0, 1})
          .epsilon,
      0.0);

  const auto m3 = MatroidSpec::Uniform(3, 2);
  std::vector<double> x = {0.9, 0.3, 0.8};
  const auto b = MaxFeasibleStep(m3, x, SlackQuery{{}, All(3), 1, 2});
  const double oracle = std::min({x[2], 1.0 - x[1], testing::ExhaustivePairSlack(m3, x, 1, 2)});
  EXPECT_NEAR(b.epsilon, oracle, 1e-15);
  EXPECT_NEAR(b.epsilon, 0.7, 1e-15);
  x[1] += b.epsilon;
  x[2] -= b.epsilon;
  EXPECT_TRUE(testing::InPolytope(m3, x));
}

// From a base point with the full ground set as window, the step equals
// the exhaustive bound, stays in P(M) and creates a tight set or zero.
TEST(MaxFeasibleStep, StaysFeasibleAndCreatesTightness) {
  CounterRng rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 8;
    const MatroidSpec m = trial % 3 == 0   ? testing::RandomUniform(rng, n)
                          : trial % 3 == 1 ? testing::RandomPartition(rng, n)
                                           : testing::RandomBinaryMatroid(rng, n, 2 + rng() % 3);
    auto x = testing::RandomBasePoint(rng, m, 1 + rng() % 4);
    const Index i = rng() % n;
    Index j = rng() % n;
    if (i == j) j = (j + 1) % n;
    const auto b = MaxFeasibleStep(m, x, SlackQuery{{}, All(n), i, j});
    const double oracle =
        std::max(0.0, std::min({x[j], 1.0 - x[i], testing::ExhaustivePairSlack(m, x, i, j)}));
    EXPECT_NEAR(b.epsilon, oracle, 1e-12);
    x[i] += b.epsilon;
    x[j] -= b.epsilon;
    EXPECT_TRUE(testing::InPolytope(m, x));
    const bool zero = x[j] <= 1e-12;
    const bool tight = testing::ExhaustivePairSlack(m, x, i, j) <= 1e-9;
    EXPECT_TRUE(zero || tight) << "trial " << trial;
  }
}

TEST(LiftToBase, HandValues) {
  EXPECT_EQ(LiftToBase(MatroidSpec::Uniform(4, 2), std::vector<double>{0.5, 0, 0, 0}),
            (std::vector<double>{1, 1, 0, 0}));
  const auto pairs = MatroidSpec::Partition(4, {{0, 1}, {2, 3}}, {1, 1});
  EXPECT_EQ(LiftToBase(pairs, std::vector<double>{0.3, 0, 0.4, 0}),
            (std::vector<double>{1, 0, 1, 0}));
  EXPECT_EQ(LiftToBase(pairs, std::vector<double>{0, 1, 1, 0}),
            (std::vector<double>{0, 1, 1, 0}));
}

TEST(LiftToBase, DominatesAndReachesFullRank) {
  CounterRng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    const MatroidSpec m = trial % 3 == 0   ? testing::RandomUniform(rng, n)
                          : trial % 3 == 1 ? testing::RandomPartition(rng, n)
                                           : testing::RandomBinaryMatroid(rng, n, 2 + rng() % 3);
    auto x = testing::RandomBasePoint(rng, m, 1 + rng() % 3);
    const double shrink = rng.Uniform();
    for (double& v : x) v *= shrink;
    const auto z = LiftToBase(m, x);
    for (std::size_t e = 0; e < n; ++e) EXPECT_GE(z[e], x[e]);
    EXPECT_NEAR(Mass(z), static_cast<double>(m.FullRank()), 1e-9);
    EXPECT_TRUE(testing::InPolytope(m, z));
    const auto d = testing::RandomNegTypeDistance(rng, n);
    const auto w = testing::RandomScores(rng, n);
    EXPECT_GE(Dispersion(d, z, w), Dispersion(d, x, w) - 1e-12);
  }
}

}  // namespace
}  // namespace divmax
