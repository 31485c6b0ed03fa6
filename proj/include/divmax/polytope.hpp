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

// Matroid-polytope primitives: exact slack minimization over a chain
// window, the largest feasible exchange step, and the lift to the base
// polytope.

#ifndef DIVMAX_POLYTOPE_HPP_
#define DIVMAX_POLYTOPE_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "divmax/common.hpp"
#include "divmax/matroid.hpp"

namespace divmax {

// Largest window that oracle-only matroids will enumerate.
inline constexpr std::size_t kMaxBruteForceWindow = 20;

// Candidate sets are prefix ∪ T with T ⊆ elements, up ∈ T, down ∉ T.
// `prefix` and `elements` are sorted and disjoint.
struct SlackQuery {
  Subset prefix;
  Subset elements;
  Index up = 0;
  std::optional<Index> down;
};

struct SlackResult {
  double min_slack = std::numeric_limits<double>::infinity();
  Subset argmin;  // T, not prefix ∪ T
};

namespace internal {

inline constexpr double kTieTolerance = 1e-12;

// Smaller slack wins; near-ties go to the smaller set, then the
// lexicographically smaller one.
inline bool Improves(double slack, const Subset& t, const SlackResult& best) {
  if (slack < best.min_slack - kTieTolerance) return true;
  if (slack > best.min_slack + kTieTolerance) return false;
  if (t.size() != best.argmin.size()) return t.size() < best.argmin.size();
  return std::lexicographical_compare(t.begin(), t.end(), best.argmin.begin(),
                                      best.argmin.end());
}

// Elements of `pool` ordered by x descending, lowest index on ties.
inline std::vector<Index> ByMassDescending(std::span<const double> x,
                                           std::vector<Index> pool) {
  std::stable_sort(pool.begin(), pool.end(),
                   [&](Index a, Index b) { return x[a] > x[b]; });
  return pool;
}

inline SlackResult UniformSlack(const UniformMatroid& m,
                                std::span<const double> x,
                                const SlackQuery& q) {
  std::vector<Index> pool;
  for (Index e : q.elements)
    if (e != q.up && (!q.down || e != *q.down)) pool.push_back(e);
  pool = ByMassDescending(x, std::move(pool));

  const double prefix_mass = Mass(x, q.prefix);
  const std::size_t p = q.prefix.size();
  SlackResult best;
  std::size_t best_t = 0;
  double mass = x[q.up];
  for (std::size_t t = 1; t <= pool.size() + 1; ++t) {
    if (t > 1) mass += x[pool[t - 2]];
    const double slack =
        static_cast<double>(std::min(p + t, m.k)) - prefix_mass - mass;
    if (slack < best.min_slack - kTieTolerance) {
      best.min_slack = slack;
      best_t = t;
    }
  }
  best.argmin.push_back(q.up);
  best.argmin.insert(best.argmin.end(), pool.begin(),
                     pool.begin() + static_cast<std::ptrdiff_t>(best_t - 1));
  std::sort(best.argmin.begin(), best.argmin.end());
  return best;
}

// Separable over blocks: each block independently picks its heaviest
// elements, and the size minimizing its own contribution.
inline SlackResult PartitionSlack(const PartitionMatroid& m,
                                  std::span<const double> x,
                                  const SlackQuery& q) {
  const std::size_t blocks = m.blocks.size();
  std::vector<std::size_t> prefix_count(blocks, 0);
  for (Index e : q.prefix) ++prefix_count[m.block_of[e]];
  std::vector<std::vector<Index>> pool(blocks);
  std::vector<bool> in_window(blocks, false);
  for (Index e : q.elements) {
    const std::size_t b = m.block_of[e];
    in_window[b] = true;
    if (e != q.up && (!q.down || e != *q.down)) pool[b].push_back(e);
  }
  const std::size_t up_block = m.block_of[q.up];

  double slack = -Mass(x, q.prefix);
  Subset argmin;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t p = prefix_count[b];
    const std::size_t cap = m.capacities[b];
    if (!in_window[b]) {
      slack += static_cast<double>(std::min(p, cap));
      continue;
    }
    const std::vector<Index> order = ByMassDescending(x, pool[b]);
    const bool forced = b == up_block;
    double mass = forced ? x[q.up] : 0.0;
    std::size_t base = forced ? 1 : 0;
    double best = static_cast<double>(std::min(p + base, cap)) - mass;
    std::size_t best_extra = 0;
    for (std::size_t t = 1; t <= order.size(); ++t) {
      mass += x[order[t - 1]];
      const double value = static_cast<double>(std::min(p + base + t, cap)) - mass;
      if (value < best - kTieTolerance) {
        best = value;
        best_extra = t;
      }
    }
    slack += best;
    if (forced) argmin.push_back(q.up);
    argmin.insert(argmin.end(), order.begin(),
                  order.begin() + static_cast<std::ptrdiff_t>(best_extra));
  }
  std::sort(argmin.begin(), argmin.end());
  return SlackResult{slack, std::move(argmin)};
}

inline SlackResult EnumeratedSlack(const MatroidSpec& m,
                                   std::span<const double> x,
                                   const SlackQuery& q) {
  Require(q.elements.size() <= kMaxBruteForceWindow,
          "slack minimization: window exceeds the brute-force limit");
  std::vector<Index> free;
  for (Index e : q.elements)
    if (e != q.up && (!q.down || e != *q.down)) free.push_back(e);
  const double prefix_mass = Mass(x, q.prefix);

  SlackResult best;
  const std::uint64_t count = std::uint64_t{1} << free.size();
  const bool use_mask = m.size() <= 64;
  std::uint64_t prefix_mask = 0;
  if (use_mask)
    for (Index e : q.prefix) prefix_mask |= std::uint64_t{1} << e;

  Subset t;
  Subset full;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    t.clear();
    t.push_back(q.up);
    double mass = x[q.up];
    std::uint64_t set_mask = prefix_mask | (std::uint64_t{1} << q.up);
    for (std::size_t b = 0; b < free.size(); ++b) {
      if (mask >> b & 1u) {
        t.push_back(free[b]);
        mass += x[free[b]];
        set_mask |= std::uint64_t{1} << free[b];
      }
    }
    std::sort(t.begin(), t.end());
    std::size_t rank = 0;
    if (use_mask) {
      rank = m.RankMask(set_mask);
    } else {
      full = Union(q.prefix, t);
      rank = m.Rank(full);
    }
    const double slack = static_cast<double>(rank) - prefix_mass - mass;
    if (Improves(slack, t, best)) {
      best.min_slack = slack;
      best.argmin = t;
    }
  }
  return best;
}

}  // namespace internal

// min over T of r(prefix ∪ T) - x(prefix ∪ T), exact. Closed forms for
// uniform and partition matroids; enumeration over at most 2^18 sets for
// oracle-only kinds.
inline SlackResult SlackMinimize(const MatroidSpec& m, std::span<const double> x,
                                 const SlackQuery& q) {
  Require(x.size() == m.size(), "slack minimization: x has the wrong length");
  Require(Contains(q.elements, q.up), "slack minimization: up not in window");
  if (q.down) {
    Require(Contains(q.elements, *q.down), "slack minimization: down not in window");
    Require(*q.down != q.up, "slack minimization: up and down coincide");
  }
  if (const auto* u = std::get_if<UniformMatroid>(&m.kind()))
    return internal::UniformSlack(*u, x, q);
  if (const auto* p = std::get_if<PartitionMatroid>(&m.kind()))
    return internal::PartitionSlack(*p, x, q);
  return internal::EnumeratedSlack(m, x, q);
}

struct StepBound {
  double epsilon = 0.0;
  bool down_hits_zero = false;  // x_down is the binding constraint
  bool up_hits_one = false;     // x_up <= 1 binds strictly before any set
  SlackResult slack;
};

// Largest epsilon keeping x + epsilon (e_up - e_down) inside P(M), given
// that the window is a ring of a chain of tight sets.
inline StepBound MaxFeasibleStep(const MatroidSpec& m, std::span<const double> x,
                                 const SlackQuery& q) {
  Require(q.down.has_value(), "feasible step: needs an element to decrease");
  StepBound bound;
  bound.slack = SlackMinimize(m, x, q);
  const double to_zero = x[*q.down];
  const double to_one = 1.0 - x[q.up];
  bound.epsilon = std::min({to_zero, to_one, bound.slack.min_slack});
  Ensure(bound.epsilon >= -tol::kNumeric,
         "feasible step: negative step, point is outside the polytope");
  bound.epsilon = std::max(bound.epsilon, 0.0);
  bound.down_hits_zero = to_zero <= bound.epsilon;
  bound.up_hits_one = !bound.down_hits_zero && to_one < bound.slack.min_slack;
  return bound;
}

// Raises x inside P(M) to a point z >= x with sum(z) = r(X): every element,
// lowest index first, is raised by its largest feasible amount.
inline std::vector<double> LiftToBase(const MatroidSpec& m,
                                      std::span<const double> x) {
  const std::size_t n = m.size();
  Require(x.size() == n, "lift: x has the wrong length");
  std::vector<double> z(x.begin(), x.end());
  SlackQuery q;
  q.elements.resize(n);
  std::iota(q.elements.begin(), q.elements.end(), Index{0});
  for (Index i = 0; i < n; ++i) {
    if (z[i] >= 1.0) continue;
    q.up = i;
    const SlackResult s = SlackMinimize(m, z, q);
    const double raise = std::min(1.0 - z[i], s.min_slack);
    if (raise > 0.0) z[i] += raise;
  }
  return z;
}

}  // namespace divmax

#endif  // DIVMAX_POLYTOPE_HPP_
