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

#include <cmath>
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "divmax/baselines.hpp"
#include "test_util.hpp"

namespace divmax {
namespace {

using testing::MaskToSet;

DistanceMatrix Line(const std::vector<double>& coords) {
  std::vector<std::vector<double>> pts;
  for (double c : coords) pts.push_back({c});
  return BuildPointDistance(pts, PointDistance::kL1);
}

DistanceMatrix AllOnes(std::size_t n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(n, n);
  m.diagonal().setZero();
  return DistanceMatrix(m);
}

// Best value over every independent set, summing each ordered pair.
double EnumerateOpt(const DistanceMatrix& d, const MatroidSpec& m, const std::vector<double>& w) {
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m.size()); ++mask) {
    const Subset s = MaskToSet(mask);
    if (m.RankMask(mask) != s.size()) continue;
    double v = 0.0;
    for (Index i : s) {
      if (!w.empty()) v += w[i];
      for (Index j : s) v += d(i, j);
    }
    best = std::max(best, v);
  }
  return best;
}

TEST(BruteForceOpt, LineEndpoints) {
  const auto r = BruteForceOpt(Line({0, 1, 2, 3}), MatroidSpec::Uniform(4, 2));
  EXPECT_EQ(r.set, (Subset{0, 3}));
  EXPECT_DOUBLE_EQ(r.value, 6.0);
}

TEST(BruteForceOpt, PartitionPicksOnePerBlock) {
  const auto m = MatroidSpec::Partition(4, {{0, 1}, {2, 3}}, {1, 1});
  const auto r = BruteForceOpt(Line({0, 1, 10, 11}), m);
  EXPECT_EQ(r.set, (Subset{0, 3}));
  EXPECT_DOUBLE_EQ(r.value, 22.0);
}

TEST(BruteForceOpt, RankOneHasNoPairs) {
  const auto r = BruteForceOpt(Line({0, 1, 2}), MatroidSpec::Uniform(3, 1));
  EXPECT_DOUBLE_EQ(r.value, 0.0);
  EXPECT_EQ(r.set, (Subset{0}));
}

TEST(BruteForceOpt, MatchesEnumeration) {
  CounterRng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    const MatroidSpec m = trial % 3 == 0   ? testing::RandomUniform(rng, n)
                          : trial % 3 == 1 ? testing::RandomPartition(rng, n)
                                           : testing::RandomBinaryMatroid(rng, n, 3);
    const auto d = testing::RandomNegTypeDistance(rng, n);
    const auto w = trial % 2 ? testing::RandomScores(rng, n) : std::vector<double>{};
    const auto r = BruteForceOpt(d, m, w);
    EXPECT_NEAR(r.value, EnumerateOpt(d, m, w), 1e-9 * (1.0 + r.value));
    EXPECT_TRUE(m.IsIndependent(r.set));
    EXPECT_EQ(r.set.size(), m.FullRank());
    EXPECT_NEAR(SetDispersion(d, r.set, w), r.value, 1e-9 * (1.0 + r.value));
  }
}

TEST(BruteForceOpt, RejectsLargeInstances) {
  EXPECT_THROW(BruteForceOpt(AllOnes(21), MatroidSpec::Uniform(21, 2)), InvalidInput);
}

TEST(LocalSearchHalf, ImprovesToEndpoints) {
  const auto r = LocalSearchHalf(Line({0, 1, 2, 3}), MatroidSpec::Uniform(4, 2), {1, 2});
  EXPECT_EQ(r.set, (Subset{0, 3}));
  EXPECT_DOUBLE_EQ(r.value, 6.0);
}

TEST(LocalSearchHalf, IntegralityGapInstance) {
  const auto r = LocalSearchHalf(AllOnes(4), MatroidSpec::Uniform(4, 2), {0, 1});
  EXPECT_DOUBLE_EQ(r.value, 2.0);
}

TEST(LocalSearchHalf, RejectsNonBasisSeed) {
  EXPECT_THROW(LocalSearchHalf(AllOnes(4), MatroidSpec::Uniform(4, 2), {0}), InvalidInput);
  const auto m = MatroidSpec::Partition(4, {{0, 1}, {2, 3}}, {1, 1});
  EXPECT_THROW(LocalSearchHalf(AllOnes(4), m, {0, 1}), InvalidInput);
}

// A local optimum is a basis no single swap improves, and is at most the
// exact optimum.
TEST(LocalSearchHalf, LocallyOptimalAndBelowOptimum) {
  CounterRng rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    const MatroidSpec m = trial % 2 ? testing::RandomUniform(rng, n)
                                    : testing::RandomPartition(rng, n);
    const auto d = testing::RandomNegTypeDistance(rng, n);
    const auto w = trial % 3 ? std::vector<double>{} : testing::RandomScores(rng, n);
    const auto seed = GreedyBasisLmo(m, m.FullRank(), testing::RandomScores(rng, n));
    const auto r = LocalSearchHalf(d, m, seed, w);
    EXPECT_EQ(r.set.size(), m.FullRank());
    EXPECT_TRUE(m.IsIndependent(r.set));
    EXPECT_LE(r.value, EnumerateOpt(d, m, w) + 1e-9);
    for (Index out : r.set) {
      for (Index in = 0; in < n; ++in) {
        if (Contains(r.set, in)) continue;
        Subset s = r.set;
        std::erase(s, out);
        s.push_back(in);
        if (!m.IsIndependent(s)) continue;
        EXPECT_LE(SetDispersion(d, s, w), r.value + 1e-9 * (1.0 + r.value));
      }
    }
  }
}

TEST(GreedyInsertion, HandValues) {
  const auto r = GreedyInsertion(Line({0, 1, 2, 3}), MatroidSpec::Uniform(4, 2));
  EXPECT_EQ(r.set, (Subset{0, 3}));
  const auto m = MatroidSpec::Partition(4, {{0, 1}, {2, 3}}, {1, 1});
  const auto p = GreedyInsertion(Line({0, 1, 10, 11}), m);
  EXPECT_EQ(p.set, (Subset{0, 3}));
  EXPECT_DOUBLE_EQ(p.value, 22.0);
}

TEST(GreedyInsertion, ReturnsBasis) {
  CounterRng rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    const auto m = testing::RandomBinaryMatroid(rng, n, 3);
    const auto d = testing::RandomNegTypeDistance(rng, n);
    const auto r = GreedyInsertion(d, m);
    EXPECT_EQ(r.set.size(), m.FullRank());
    EXPECT_TRUE(m.IsIndependent(r.set));
    EXPECT_LE(r.value, EnumerateOpt(d, m, {}) + 1e-9);
  }
}

TEST(RandomizedRounding, FullScalingDrawsNothing) {
  const auto r = RandomizedRoundCardinality(std::vector<double>(4, 0.5), 2, 1.0, 7);
  EXPECT_TRUE(r.set.empty());
  EXPECT_EQ(r.draws, 1u);
}

TEST(RandomizedRounding, IntegralPointIsItsSupport) {
  const auto r = RandomizedRoundCardinality(std::vector<double>{1, 0, 1, 0}, 2, 0.0, 7);
  EXPECT_EQ(r.set, (Subset{0, 2}));
}

TEST(RandomizedRounding, ExpectedSizeMatchesScaledMass) {
  const std::vector<double> x = {0.6, 0.6, 0.6, 0.6};
  double total = 0.0;
  const int draws = 10000;
  for (int s = 0; s < draws; ++s) {
    CounterRng rng(static_cast<std::uint64_t>(s));
    total += static_cast<double>(DrawScaled(x, 0.2, rng).size());
  }
  EXPECT_NEAR(total / draws, 1.92, 0.05 * 1.92);
}

TEST(RandomizedRounding, ArgumentChecksAndRetryCap) {
  const std::vector<double> x(4, 0.5);
  EXPECT_THROW(RandomizedRoundCardinality(x, 2, 0.0, 1, 0), InternalError);
  EXPECT_THROW(RandomizedRoundCardinality(x, 3, 0.0, 1), InvalidInput);
  EXPECT_THROW(RandomizedRoundCardinality(x, 2, 1.5, 1), InvalidInput);
  EXPECT_THROW(RandomizedRoundCardinality(std::vector<double>{1.5, 0.5}, 2, 0.0, 1),
               InvalidInput);
}

TEST(RandomizedRounding, DeterministicForSeed) {
  CounterRng rng(54);
  const auto x = testing::RandomBasePoint(rng, MatroidSpec::Uniform(10, 4));
  const auto a = RandomizedRoundCardinality(x, 4, 0.1, 99);
  const auto b = RandomizedRoundCardinality(x, 4, 0.1, 99);
  EXPECT_EQ(a.set, b.set);
  EXPECT_LE(a.set.size(), 4u);
}

}  // namespace
}  // namespace divmax
