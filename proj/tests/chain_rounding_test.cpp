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
#include "divmax/chain_rounding.hpp"
#include "divmax/polytope.hpp"
#include "divmax/slice_relaxation.hpp"
#include "test_util.hpp"

namespace divmax {
namespace {

using testing::MaskToSet;

DistanceMatrix AllOnes(std::size_t n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(n, n);
  m.diagonal().setZero();
  return DistanceMatrix(m);
}

MatroidSpec Pairs() { return MatroidSpec::Partition(4, {{0, 1}, {2, 3}}, {1, 1}); }

MatroidSpec RandomMatroid(CounterRng& rng, std::size_t n, int flavor) {
  switch (flavor % 3) {
    case 0: return testing::RandomUniform(rng, n);
    case 1: return testing::RandomPartition(rng, n);
    default: return testing::RandomBinaryMatroid(rng, n, 2 + rng() % 3);
  }
}

// Length of the longest chain of tight sets from the empty set to the
// support of x, by dynamic programming over all subsets of the support.
std::size_t LongestTightChain(const MatroidSpec& m, std::span<const double> x) {
  std::uint64_t support = 0;
  for (Index e = 0; e < x.size(); ++e)
    if (x[e] > 0.0) support |= std::uint64_t{1} << e;
  std::vector<int> best(std::size_t{1} << x.size(), -1);
  auto tight = [&](std::uint64_t s) {
    return std::abs(static_cast<double>(m.RankMask(s)) - Mass(x, MaskToSet(s))) <= 1e-7;
  };
  best[0] = 0;
  for (std::uint64_t s = 1; s <= support; ++s) {
    if ((s & ~support) || !tight(s)) continue;
    for (std::uint64_t t = (s - 1) & s;; t = (t - 1) & s) {
      if (best[t] >= 0) best[s] = std::max(best[s], best[t] + 1);
      if (t == 0) break;
    }
  }
  return static_cast<std::size_t>(best[support]);
}

// No proper nonempty part of a ring extends the chain.
bool IsMaximal(const MatroidSpec& m, std::span<const double> x, const ChainState& chain) {
  Subset prefix;
  for (const Ring& ring : chain.rings) {
    const std::size_t r = ring.elements.size();
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << r); ++mask) {
      Subset t;
      for (std::size_t b = 0; b < r; ++b)
        if (mask >> b & 1) t.push_back(ring.elements[b]);
      const Subset s = Union(prefix, t);
      if (std::abs(static_cast<double>(m.Rank(s)) - Mass(x, s)) <= 1e-7) return false;
    }
    prefix = Union(prefix, ring.elements);
  }
  return true;
}

TEST(BuildChain, UniformHalfPointIsOneRing) {
  const auto c = BuildChain(MatroidSpec::Uniform(4, 2), std::vector<double>(4, 0.5));
  ASSERT_EQ(c.rings.size(), 1u);
  EXPECT_EQ(c.rings[0].elements, (Subset{0, 1, 2, 3}));
  EXPECT_EQ(c.rings[0].mass, 2u);
  EXPECT_FALSE(c.rings[0].integral);
}

TEST(BuildChain, IntegralPointGivesSingletonRings) {
  const auto c = BuildChain(MatroidSpec::Uniform(4, 2), std::vector<double>{1, 0, 1, 0});
  ASSERT_EQ(c.rings.size(), 2u);
  EXPECT_EQ(c.rings[0].elements, (Subset{0}));
  EXPECT_EQ(c.rings[1].elements, (Subset{2}));
  EXPECT_TRUE(c.rings[0].integral && c.rings[1].integral);
  EXPECT_EQ(c.ChainSet(2), (Subset{0, 2}));
}

TEST(BuildChain, PartitionBlocksBecomeRings) {
  const auto c = BuildChain(Pairs(), std::vector<double>(4, 0.5));
  ASSERT_EQ(c.rings.size(), 2u);
  EXPECT_EQ(c.rings[0].elements, (Subset{0, 1}));
  EXPECT_EQ(c.rings[1].elements, (Subset{2, 3}));
  EXPECT_EQ(c.rings[0].mass, 1u);
  EXPECT_EQ(c.Progress(), 2u);
}

TEST(BuildChain, RejectsPointsOffTheBasePolytope) {
  EXPECT_THROW(BuildChain(MatroidSpec::Uniform(4, 2), std::vector<double>(4, 0.25)),
               InvalidInput);
  EXPECT_THROW(BuildChain(MatroidSpec::Uniform(3, 2), std::vector<double>{1.5, 0.5, 0}),
               InvalidInput);
}

// The built chain is valid, maximal, and as long as the longest chain of
// tight sets found by enumeration.
TEST(BuildChain, MaximalAgainstEnumeration) {
  CounterRng rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    const auto m = RandomMatroid(rng, n, trial);
    if (m.FullRank() == 0) continue;
    const auto x = testing::RandomBasePoint(rng, m, 1 + rng() % 4);
    const auto chain = BuildChain(m, x);
    EXPECT_FALSE(ChainViolation(m, x, chain).has_value()) << *ChainViolation(m, x, chain);
    EXPECT_TRUE(IsMaximal(m, x, chain)) << "trial " << trial;
    EXPECT_EQ(chain.rings.size(), LongestTightChain(m, x)) << "trial " << trial;
    EXPECT_EQ(chain.TotalMass(), m.FullRank());
  }
}

// Restricting the slack search to the ring loses nothing: the minimum over
// prefix ∪ T equals the minimum over every set separating the pair.
TEST(BuildChain, RingSlackEqualsGlobalSlack) {
  CounterRng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 8;
    const auto m = RandomMatroid(rng, n, trial);
    if (m.FullRank() == 0) continue;
    const auto x = testing::RandomBasePoint(rng, m, 2 + rng() % 3);
    const auto chain = BuildChain(m, x);
    for (std::size_t l = 0; l < chain.rings.size(); ++l) {
      const Ring& ring = chain.rings[l];
      if (ring.integral) continue;
      const Subset prefix = chain.ChainSet(l);
      for (Index i : ring.elements) {
        for (Index j : ring.elements) {
          if (i == j) continue;
          const auto local = SlackMinimize(m, x, SlackQuery{prefix, ring.elements, i, j});
          EXPECT_NEAR(local.min_slack, testing::ExhaustivePairSlack(m, x, i, j), 1e-12);
        }
      }
    }
  }
}

TEST(SelectPair, TieGoesToFirstPair) {
  const auto c = BuildChain(MatroidSpec::Uniform(4, 2), std::vector<double>(4, 0.5));
  EXPECT_EQ(SelectPair(AllOnes(4), std::vector<double>(4, 0.5), c), (std::pair<Index, Index>{0, 1}));
}

TEST(SelectPair, SmallestProduct) {
  Eigen::MatrixXd m = 10.0 * Eigen::MatrixXd::Ones(4, 4);
  m.diagonal().setZero();
  m(0, 1) = m(1, 0) = 1.0;
  const std::vector<double> x = {0.9, 0.1, 0.5, 0.5};
  const auto c = BuildChain(MatroidSpec::Uniform(4, 2), x);
  ASSERT_EQ(c.rings.size(), 1u);
  EXPECT_EQ(SelectPair(DistanceMatrix(m), x, c), (std::pair<Index, Index>{0, 1}));
}

TEST(SelectPair, StaysInsideRings) {
  Eigen::MatrixXd m = 10.0 * Eigen::MatrixXd::Ones(4, 4);
  m.diagonal().setZero();
  m(0, 2) = m(2, 0) = 0.01;  // cheap pair across the two rings
  m(2, 3) = m(3, 2) = 5.0;
  const std::vector<double> x(4, 0.5);
  const auto c = BuildChain(Pairs(), x);
  EXPECT_EQ(SelectPair(DistanceMatrix(m), x, c), (std::pair<Index, Index>{2, 3}));
}

TEST(SelectPair, RejectsIntegralPoint) {
  const std::vector<double> x = {1, 0, 1, 0};
  const auto c = BuildChain(MatroidSpec::Uniform(4, 2), x);
  EXPECT_THROW(SelectPair(AllOnes(4), x, c), InvalidInput);
}

TEST(RoundStep, ErasesOnSimultaneousEvents) {
  const auto m = MatroidSpec::Uniform(4, 2);
  RoundingState state{std::vector<double>(4, 0.5), {}};
  state.chain = BuildChain(m, state.x);
  const StepRecord rec = RoundStep(AllOnes(4), m, state);
  EXPECT_EQ(rec.up, 0u);
  EXPECT_EQ(rec.down, 1u);
  EXPECT_DOUBLE_EQ(rec.epsilon, 0.5);
  EXPECT_EQ(state.x, (std::vector<double>{1, 0, 0.5, 0.5}));
  EXPECT_DOUBLE_EQ(rec.loss, 0.5);
  EXPECT_DOUBLE_EQ(rec.pair_term, 0.5);
  EXPECT_EQ(rec.event, StepEvent::kErased);
  // The {0}-tight set is recovered by re-refining the ring.
  ASSERT_EQ(state.chain.rings.size(), 2u);
  EXPECT_EQ(state.chain.rings[0].elements, (Subset{0}));
  EXPECT_EQ(state.chain.rings[1].elements, (Subset{2, 3}));
}

TEST(Round, IntegralityGapInstance) {
  const auto m = MatroidSpec::Uniform(4, 2);
  const auto r = Round(AllOnes(4), m, std::vector<double>(4, 0.5));
  EXPECT_EQ(r.basis.size(), 2u);
  EXPECT_DOUBLE_EQ(SetDispersion(AllOnes(4), r.basis), 2.0);
  EXPECT_DOUBLE_EQ(r.trace.total_loss, 1.0);
  EXPECT_EQ(r.trace.steps.size(), 2u);
}

TEST(Round, IntegralInputIsUnchanged) {
  const auto r = Round(AllOnes(4), MatroidSpec::Uniform(4, 2), std::vector<double>{0, 1, 0, 1});
  EXPECT_EQ(r.basis, (Subset{1, 3}));
  EXPECT_TRUE(r.trace.steps.empty());
  EXPECT_EQ(r.trace.total_loss, 0.0);
}

TEST(Round, LossFactor) {
  EXPECT_DOUBLE_EQ(RoundingLossFactor(1), 4.0);
  EXPECT_NEAR(RoundingLossFactor(10), (4.0 + 2.0 * std::log(10.0)) / 10.0, 1e-15);
  EXPECT_DOUBLE_EQ(ReverseIndexBound(1, 4, 3.0), 1.5);
  EXPECT_DOUBLE_EQ(ReverseIndexBound(4, 2, 3.0), 2.0 / 16.0 * 3.0);
}

// Every step keeps x on the base polytope (exhaustive check), keeps the
// chain valid and maximal, and strictly decreases f - q; a from-scratch
// rebuild agrees with the incremental chain.
TEST(Round, StepInvariantsOnRandomBasePoints) {
  CounterRng rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    const auto m = RandomMatroid(rng, n, trial);
    const std::size_t k = m.FullRank();
    if (k == 0) continue;
    const auto d = testing::RandomNegTypeDistance(rng, n);
    const auto w = trial % 2 ? testing::RandomScores(rng, n) : std::vector<double>{};
    const auto x = testing::RandomBasePoint(rng, m, 1 + rng() % 4);
    RoundOptions opts;
    opts.verify_chain = true;
    opts.observer = [&](const RoundingState& s, const StepRecord& rec) {
      EXPECT_NEAR(Mass(s.x), static_cast<double>(k), 1e-9);
      EXPECT_TRUE(testing::InPolytope(m, s.x, 1e-7));
      const auto violation = ChainViolation(m, s.x, s.chain);
      EXPECT_FALSE(violation.has_value()) << *violation;
      EXPECT_TRUE(IsMaximal(m, s.x, s.chain));
      EXPECT_EQ(s.chain.rings.size(), LongestTightChain(m, s.x));
      EXPECT_LT(rec.progress_after, rec.progress_before);
      EXPECT_LE(rec.loss, rec.pair_term + 1e-9);
      EXPECT_NEAR(rec.value_after, Dispersion(d, s.x, w), 1e-9 * (1.0 + rec.value_after));
    };
    const auto r = Round(d, m, x, w, opts);
    EXPECT_LE(r.trace.steps.size(), n);
    EXPECT_EQ(r.basis.size(), k);
    EXPECT_TRUE(m.IsIndependent(r.basis));
    double total = 0.0;
    for (const auto& s : r.trace.steps) total += s.loss;
    EXPECT_NEAR(r.trace.total_loss, total, 1e-12);
    EXPECT_NEAR(SetDispersion(d, r.basis, w), Dispersion(d, x, w) - total,
                1e-9 * (1.0 + Dispersion(d, x, w)));
  }
}

// From the relaxation optimum the per-step and end-to-end bounds hold.
TEST(Round, BoundsFromRelaxationOptimum) {
  CounterRng rng(44);
  SliceOptions opts;
  opts.gap_tolerance = 1e-10;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 11;
    const auto m = RandomMatroid(rng, n, trial % 2);
    const std::size_t k = m.FullRank();
    const auto dm = testing::RandomNegTypeDistance(rng, n);
    const auto d = NegTypeDistance::Certify(dm);
    const auto relax = SweepSlices(d, m, {}, opts);
    auto x = relax.best.x;
    if (relax.best.alpha < k) x = LiftToBase(m, x);
    const auto r = Round(dm, m, x);
    const double quad = Dispersion(dm, x);
    const auto& steps = r.trace.steps;
    for (std::size_t t = 0; t < steps.size(); ++t) {
      const std::size_t reverse = steps.size() - t;
      const double budget = std::min(2.0 / (static_cast<double>(reverse) * static_cast<double>(k)),
                                     2.0 / (static_cast<double>(reverse) * reverse)) * quad;
      EXPECT_LE(steps[t].loss, budget + 1e-9) << "trial " << trial << " step " << t;
      EXPECT_DOUBLE_EQ(r.trace.reverse_index_bounds[t], ReverseIndexBound(reverse, k, quad));
    }
    const double factor = (4.0 + 2.0 * std::log(static_cast<double>(k))) / static_cast<double>(k);
    EXPECT_GE(SetDispersion(dm, r.basis), (1.0 - factor) * quad - 1e-9);
  }
}

}  // namespace
}  // namespace divmax
