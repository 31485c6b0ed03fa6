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

// Reference algorithms used to judge the relaxation and the rounding.

#ifndef DIVMAX_BASELINES_HPP_
#define DIVMAX_BASELINES_HPP_

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "divmax/common.hpp"
#include "divmax/distance.hpp"
#include "divmax/matroid.hpp"
#include "divmax/rng.hpp"

namespace divmax {

struct SetValue {
  Subset set;
  double value = 0.0;
};

inline constexpr std::size_t kMaxBruteForceSize = 20;

// Exact optimum of x^T D x + w^T x over independent sets. Depth-first in
// lexicographic set order; a later set replaces the incumbent when it is
// better by more than a relative 1e-12, or ties within that and is larger,
// so the reported set is always a basis.
inline SetValue BruteForceOpt(const DistanceMatrix& d, const MatroidSpec& m,
                              std::span<const double> w = {}) {
  const std::size_t n = m.size();
  Require(n <= kMaxBruteForceSize, "brute force needs n <= 20");
  Require(d.size() == n, "distance and matroid sizes differ");
  Require(w.empty() || w.size() == n, "scores have the wrong length");

  SetValue best{{}, 0.0};
  Subset current;
  auto visit = [&](auto&& self, Index from, double value) -> void {
    const double slack = 1e-12 * std::max(1.0, std::abs(best.value));
    if (value > best.value + slack ||
        (value >= best.value - slack && current.size() > best.set.size())) {
      best.set = current;
      best.value = value;
    }
    for (Index e = from; e < n; ++e) {
      current.push_back(e);
      if (m.Rank(current) == current.size()) {
        double gain = w.empty() ? 0.0 : w[e];
        for (std::size_t t = 0; t + 1 < current.size(); ++t)
          gain += 2.0 * d(current[t], e);
        self(self, e + 1, value + gain);
      }
      current.pop_back();
    }
  };
  visit(visit, 0, 0.0);
  return best;
}

// Greedy insertion: from the empty set, repeatedly add the element with the
// largest marginal gain that keeps the set independent (lowest index on
// ties), until a basis is reached.
inline SetValue GreedyInsertion(const DistanceMatrix& d, const MatroidSpec& m,
                                std::span<const double> w = {}) {
  const std::size_t n = m.size();
  Require(d.size() == n, "distance and matroid sizes differ");
  Require(w.empty() || w.size() == n, "scores have the wrong length");
  Subset set;
  while (set.size() < m.FullRank()) {
    Index best = n;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (Index e = 0; e < n; ++e) {
      if (Contains(set, e)) continue;
      double gain = w.empty() ? 0.0 : w[e];
      for (Index b : set) gain += 2.0 * d(e, b);
      if (gain <= best_gain) continue;
      Subset grown = set;
      grown.insert(std::upper_bound(grown.begin(), grown.end(), e), e);
      if (m.Rank(grown) != grown.size()) continue;
      best = e;
      best_gain = gain;
    }
    Require(best < n, "greedy insertion: no independent extension");
    set.insert(std::upper_bound(set.begin(), set.end(), best), best);
  }
  return {set, SetDispersion(d, set, w)};
}

// Oblivious single-swap local search over bases: while some exchange
// B - out + in stays independent and improves the value by more than a
// relative 1e-12, apply the best one (lexicographic (out, in) on ties).
inline SetValue LocalSearchHalf(const DistanceMatrix& d, const MatroidSpec& m,
                                Subset seed, std::span<const double> w = {}) {
  const std::size_t n = m.size();
  Require(d.size() == n, "distance and matroid sizes differ");
  Subset basis = Normalize(std::move(seed));
  Require(m.IsIndependent(basis), "local search: seed is not independent");
  Require(basis.size() == m.FullRank(), "local search: seed is not a basis");

  double value = SetDispersion(d, basis, w);
  for (std::size_t round = 0; round < 100 * n * n + 100; ++round) {
    double best_gain = 1e-12 * std::max(1.0, std::abs(value));
    Index best_out = n;
    Index best_in = n;
    for (Index out : basis) {
      for (Index in = 0; in < n; ++in) {
        if (Contains(basis, in)) continue;
        double gain = w.empty() ? 0.0 : w[in] - w[out];
        for (Index b : basis) {
          if (b == out) continue;
          gain += 2.0 * (d(in, b) - d(out, b));
        }
        if (gain <= best_gain) continue;
        Subset swapped = basis;
        swapped.erase(std::find(swapped.begin(), swapped.end(), out));
        swapped.insert(std::upper_bound(swapped.begin(), swapped.end(), in), in);
        if (m.Rank(swapped) != swapped.size()) continue;
        best_gain = gain;
        best_out = out;
        best_in = in;
      }
    }
    if (best_out == n) break;
    basis.erase(std::find(basis.begin(), basis.end(), best_out));
    basis.insert(std::upper_bound(basis.begin(), basis.end(), best_in), best_in);
    value = SetDispersion(d, basis, w);
  }
  return {basis, value};
}

// One independent draw of each element with probability (1 - epsilon) x_i.
inline Subset DrawScaled(std::span<const double> x_star, double epsilon,
                         CounterRng& rng) {
  Subset s;
  for (Index i = 0; i < x_star.size(); ++i)
    if (rng.Uniform() < (1.0 - epsilon) * x_star[i]) s.push_back(i);
  return s;
}

struct RandomizedRounding {
  Subset set;
  std::size_t draws = 0;
};

// Cardinality-constrained randomized rounding: redraw the scaled point
// until at most k elements come up, giving up after `max_draws`.
inline RandomizedRounding RandomizedRoundCardinality(
    std::span<const double> x_star, std::size_t k, double epsilon,
    std::uint64_t seed, std::size_t max_draws = 10000) {
  Require(epsilon >= 0.0 && epsilon <= 1.0, "randomized rounding: epsilon in [0, 1]");
  for (double v : x_star)
    Require(v >= -tol::kTight && v <= 1.0 + tol::kTight,
            "randomized rounding: x* must lie in [0, 1]");
  Require(std::abs(Mass(x_star) - static_cast<double>(k)) <= 1e-6,
          "randomized rounding: x* must have mass k");
  CounterRng rng(seed);
  RandomizedRounding out;
  while (out.draws < max_draws) {
    ++out.draws;
    out.set = DrawScaled(x_star, epsilon, rng);
    if (out.set.size() <= k) return out;
  }
  throw InternalError("randomized rounding: retry cap exceeded");
}

}  // namespace divmax

#endif  // DIVMAX_BASELINES_HPP_
