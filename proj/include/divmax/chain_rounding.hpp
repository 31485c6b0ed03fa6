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

// Deterministic rounding of a point on the matroid base polytope to a basis.
//
// The point is kept on the minimal face that contains it, described by a
// maximal chain of tight sets ∅ = S_0 ⊊ S_1 ⊊ ... ⊊ S_p = support(x). The
// differences R_l = S_l \ S_{l-1} ("rings") carry integral mass; a ring is
// either one integral element or at least two fractional ones. Every step
// picks, among pairs of fractional elements sharing a ring, the pair with
// the smallest x_i x_j d(i,j), and shifts mass from one to the other until
// the lighter one vanishes or a new tight set splits the ring. On a
// negative-type distance each step loses at most 2 x_i x_j d(i,j), which the
// ring structure bounds by min(2/(mk), 2/m^2) x*^T D x* when m steps remain.

#ifndef DIVMAX_CHAIN_ROUNDING_HPP_
#define DIVMAX_CHAIN_ROUNDING_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "divmax/common.hpp"
#include "divmax/distance.hpp"
#include "divmax/matroid.hpp"
#include "divmax/polytope.hpp"

namespace divmax {

struct Ring {
  Subset elements;
  std::size_t mass = 0;  // r(S_l) - r(S_{l-1})
  bool integral = false;
};

struct ChainState {
  std::vector<Ring> rings;

  // S_l, the union of the first l rings.
  Subset ChainSet(std::size_t l) const {
    Subset s;
    for (std::size_t r = 0; r < l; ++r) s = Union(s, rings[r].elements);
    return s;
  }

  std::size_t FractionalRings() const {
    return static_cast<std::size_t>(std::count_if(
        rings.begin(), rings.end(), [](const Ring& r) { return !r.integral; }));
  }

  std::size_t FractionalElements() const {
    std::size_t f = 0;
    for (const Ring& r : rings)
      if (!r.integral) f += r.elements.size();
    return f;
  }

  // f - q, which bounds the number of remaining rounding steps.
  std::size_t Progress() const { return FractionalElements() - FractionalRings(); }

  std::size_t TotalMass() const {
    std::size_t k = 0;
    for (const Ring& r : rings) k += r.mass;
    return k;
  }
};

namespace internal {

inline bool IsIntegral(double v) { return v >= 1.0 - tol::kTight; }

// Splits the ring `elements` (sitting on top of `prefix`) until no proper
// subset of it extends the chain: integral elements are peeled off first,
// then any set prefix ∪ T with slack <= tol::kTight becomes a new link.
inline void RefineRing(const MatroidSpec& m, std::span<const double> x,
                       const Subset& prefix, const Subset& elements,
                       std::vector<Ring>& out) {
  Ensure(!elements.empty(), "chain: empty ring");
  const std::size_t base_rank = m.Rank(prefix);
  const std::size_t top_rank = m.Rank(Union(prefix, elements));
  Ensure(top_rank >= base_rank, "chain: rank decreased along the chain");
  const std::size_t mass = top_rank - base_rank;
  Ensure(std::abs(Mass(x, elements) - static_cast<double>(mass)) <= 1e-6,
         "chain: ring mass drifted away from its rank increment");

  if (elements.size() == 1) {
    Ensure(mass == 1 && IsIntegral(x[elements[0]]),
           "chain: singleton ring must be one integral element");
    out.push_back({elements, mass, true});
    return;
  }

  for (Index e : elements) {
    if (IsIntegral(x[e])) {
      const Subset single{e};
      RefineRing(m, x, prefix, single, out);
      RefineRing(m, x, Union(prefix, single), Difference(elements, single), out);
      return;
    }
  }

  // Every proper nonempty T either contains `first` and misses some j, or
  // misses `first` and contains some i.
  const Index first = elements.front();
  SlackQuery q{prefix, elements, first, std::nullopt};
  auto try_split = [&](Index up, Index down) {
    q.up = up;
    q.down = down;
    const SlackResult s = SlackMinimize(m, x, q);
    if (s.min_slack > tol::kTight) return false;
    RefineRing(m, x, prefix, s.argmin, out);
    RefineRing(m, x, Union(prefix, s.argmin), Difference(elements, s.argmin), out);
    return true;
  };
  for (std::size_t t = 1; t < elements.size(); ++t)
    if (try_split(first, elements[t])) return;
  for (std::size_t t = 1; t < elements.size(); ++t)
    if (try_split(elements[t], first)) return;

  Ensure(elements.size() > mass, "chain: fractional ring is too small for its mass");
  out.push_back({elements, mass, false});
}

}  // namespace internal

// A maximal chain of tight sets for x on the base polytope. Elements with
// x_i = 0 are left out of every ring.
inline ChainState BuildChain(const MatroidSpec& m, std::span<const double> x) {
  const std::size_t n = m.size();
  Require(x.size() == n, "chain: x has the wrong length");
  Subset support;
  for (Index i = 0; i < n; ++i) {
    Require(x[i] >= -tol::kTight && x[i] <= 1.0 + tol::kTight,
            "chain: x must lie in [0, 1]");
    if (x[i] > 0.0) support.push_back(i);
  }
  Require(std::abs(Mass(x) - static_cast<double>(m.FullRank())) <= 1e-6,
          "chain: x is not on the base polytope");
  ChainState chain;
  if (support.empty()) return chain;
  internal::RefineRing(m, x, {}, support, chain.rings);
  return chain;
}

// Returns a description of the first broken chain invariant, if any.
inline std::optional<std::string> ChainViolation(const MatroidSpec& m,
                                                 std::span<const double> x,
                                                 const ChainState& chain,
                                                 double tight_tolerance = tol::kTight) {
  Subset prefix;
  std::size_t prev_rank = 0;
  for (std::size_t l = 0; l < chain.rings.size(); ++l) {
    const Ring& ring = chain.rings[l];
    if (ring.elements.empty()) return "ring " + std::to_string(l) + " is empty";
    prefix = Union(prefix, ring.elements);
    const std::size_t rank = m.Rank(prefix);
    if (std::abs(Mass(x, prefix) - static_cast<double>(rank)) > tight_tolerance)
      return "chain set " + std::to_string(l + 1) + " is not tight";
    if (rank <= prev_rank || ring.mass != rank - prev_rank)
      return "ring " + std::to_string(l) + " has a wrong mass";
    prev_rank = rank;
    if (ring.integral) {
      if (ring.elements.size() != 1 || !internal::IsIntegral(x[ring.elements[0]]))
        return "integral ring " + std::to_string(l) + " is not a single 1";
    } else {
      if (ring.elements.size() < 2)
        return "fractional ring " + std::to_string(l) + " has one element";
      for (Index e : ring.elements)
        if (x[e] <= 0.0 || internal::IsIntegral(x[e]))
          return "fractional ring " + std::to_string(l) + " holds a non-fractional element";
    }
  }
  return std::nullopt;
}

// The pair (i < j) of fractional elements sharing a ring with the smallest
// x_i x_j d(i,j); lexicographically smallest on ties.
inline std::pair<Index, Index> SelectPair(const DistanceMatrix& d,
                                          std::span<const double> x,
                                          const ChainState& chain) {
  std::optional<std::pair<Index, Index>> best;
  double best_term = std::numeric_limits<double>::infinity();
  for (const Ring& ring : chain.rings) {
    if (ring.integral) continue;
    const Subset& r = ring.elements;
    for (std::size_t a = 0; a < r.size(); ++a) {
      for (std::size_t b = a + 1; b < r.size(); ++b) {
        const double term = x[r[a]] * x[r[b]] * d(r[a], r[b]);
        const double slack = 1e-12 * std::max(1.0, std::abs(best_term));
        const std::pair<Index, Index> candidate{r[a], r[b]};
        if (!best || term < best_term - slack ||
            (term <= best_term + slack && candidate < *best)) {
          best_term = std::min(term, best_term);
          best = candidate;
        }
      }
    }
  }
  Require(best.has_value(), "select pair: no fractional ring left");
  return *best;
}

enum class StepEvent { kErased, kRefined };

struct StepRecord {
  Index up = 0;    // element that gained mass
  Index down = 0;  // element that lost mass
  int sign = 1;    // +1 when up < down, i.e. the selected pair kept its order
  double epsilon = 0.0;
  StepEvent event = StepEvent::kRefined;
  double value_before = 0.0;
  double value_after = 0.0;
  double loss = 0.0;       // value_before - value_after, may be negative
  double pair_term = 0.0;  // 2 x_i x_j d(i,j) before the step
  std::size_t progress_before = 0;
  std::size_t progress_after = 0;
  std::optional<Subset> new_tight_set;
};

struct RoundingState {
  std::vector<double> x;
  ChainState chain;
};

// One exchange step. The sign of the move is chosen so that the part of the
// objective that is linear along e_i - e_j does not decrease (+ on ties).
// When x_down reaching 0 coincides with a new tight set, the element is
// erased and the ring is re-refined, which recovers that set.
inline StepRecord RoundStep(const DistanceMatrix& d, const MatroidSpec& m,
                            RoundingState& state, std::span<const double> w = {}) {
  auto& x = state.x;
  auto& rings = state.chain.rings;
  const auto [i, j] = SelectPair(d, x, state.chain);

  std::size_t l = 0;
  while (!Contains(rings[l].elements, i)) ++l;
  const Subset prefix = state.chain.ChainSet(l);
  const Subset ring = rings[l].elements;

  StepRecord rec;
  rec.value_before = Dispersion(d, x, w);
  rec.pair_term = 2.0 * x[i] * x[j] * d(i, j);
  rec.progress_before = state.chain.Progress();

  double di = 0.0;
  double dj = 0.0;
  for (Index e = 0; e < x.size(); ++e) {
    di += d(i, e) * x[e];
    dj += d(j, e) * x[e];
  }
  double linear = 2.0 * (di - dj) + 2.0 * d(i, j) * (x[i] - x[j]);
  if (!w.empty()) linear += w[i] - w[j];
  const double scale = 1.0 + std::abs(di) + std::abs(dj);
  const bool forward = linear >= 0.0 || std::abs(linear) <= tol::kNumeric * scale;
  rec.up = forward ? i : j;
  rec.down = forward ? j : i;
  rec.sign = forward ? 1 : -1;

  const StepBound bound =
      MaxFeasibleStep(m, x, SlackQuery{prefix, ring, rec.up, rec.down});
  rec.epsilon = bound.epsilon;
  const double pair_mass = x[rec.up] + x[rec.down];
  if (bound.down_hits_zero) {
    x[rec.down] = 0.0;
    x[rec.up] = pair_mass;
  } else {
    x[rec.up] += rec.epsilon;
    x[rec.down] -= rec.epsilon;
  }
  if (x[rec.up] >= 1.0 - tol::kTight) {
    x[rec.up] = 1.0;
    x[rec.down] = std::max(0.0, pair_mass - 1.0);
  }
  if (x[rec.down] <= tol::kTight) {
    x[rec.down] = 0.0;
    x[rec.up] = std::min(1.0, pair_mass);
  }

  std::vector<Ring> replacement;
  if (x[rec.down] == 0.0) {
    rec.event = StepEvent::kErased;
    internal::RefineRing(m, x, prefix, Difference(ring, Subset{rec.down}), replacement);
  } else {
    rec.event = StepEvent::kRefined;
    const Subset t = bound.up_hits_one ? Subset{rec.up} : bound.slack.argmin;
    Ensure(Contains(t, rec.up) && !Contains(t, rec.down),
           "round step: new tight set must separate the pair");
    Ensure(t.size() < ring.size(), "round step: new tight set must be proper");
    rec.new_tight_set = Union(prefix, t);
    internal::RefineRing(m, x, prefix, t, replacement);
    internal::RefineRing(m, x, Union(prefix, t), Difference(ring, t), replacement);
  }
  rings.erase(rings.begin() + static_cast<std::ptrdiff_t>(l));
  rings.insert(rings.begin() + static_cast<std::ptrdiff_t>(l), replacement.begin(),
               replacement.end());

  rec.value_after = Dispersion(d, x, w);
  rec.loss = rec.value_before - rec.value_after;
  rec.progress_after = state.chain.Progress();
  return rec;
}

struct RoundingTrace {
  std::vector<StepRecord> steps;
  double start_value = 0.0;      // g(x*) including scores
  double start_quadratic = 0.0;  // x*^T D x*
  double total_loss = 0.0;
  // min(2/(mk), 2/m^2) x*^T D x*, with m counted from the end of the run.
  std::vector<double> reverse_index_bounds;
  std::size_t rank = 0;
};

// (4 + 2 ln k) / k; the rounded value keeps at least 1 minus this fraction.
inline double RoundingLossFactor(std::size_t k) {
  if (k == 0) return 0.0;
  const double kk = static_cast<double>(k);
  return (4.0 + 2.0 * std::log(kk)) / kk;
}

inline double ReverseIndexBound(std::size_t m, std::size_t k, double quadratic) {
  const double mm = static_cast<double>(m);
  const double kk = static_cast<double>(k);
  return std::min(2.0 / (mm * kk), 2.0 / (mm * mm)) * quadratic;
}

struct RoundOptions {
  // Rebuild the chain from scratch after every step and compare ring counts
  // with the incrementally maintained chain.
  bool verify_chain = false;
  // Called after every step with the updated state.
  std::function<void(const RoundingState&, const StepRecord&)> observer;
};

struct RoundingResult {
  Subset basis;
  std::vector<double> x;
  RoundingTrace trace;
};

// Coordinates within tol::kTight of 0 or 1 are set to it exactly; the
// rounding starts from this point.
inline std::vector<double> SnapNearIntegral(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  for (double& v : out) {
    if (v <= tol::kTight) v = 0.0;
    if (v >= 1.0 - tol::kTight) v = 1.0;
  }
  return out;
}

inline RoundingResult Round(const DistanceMatrix& d, const MatroidSpec& m,
                            std::span<const double> x_star,
                            std::span<const double> w = {},
                            const RoundOptions& opts = {}) {
  const std::size_t n = m.size();
  Require(d.size() == n, "round: distance and matroid sizes differ");
  Require(x_star.size() == n, "round: x* has the wrong length");
  Require(w.empty() || w.size() == n, "round: scores have the wrong length");

  RoundingState state;
  state.x = SnapNearIntegral(x_star);
  state.chain = BuildChain(m, state.x);

  RoundingResult result;
  RoundingTrace& trace = result.trace;
  trace.rank = m.FullRank();
  trace.start_value = Dispersion(d, x_star, w);
  trace.start_quadratic = Dispersion(d, x_star);

  while (state.chain.FractionalRings() > 0) {
    Ensure(trace.steps.size() < n, "round: more than n steps");
    StepRecord rec = RoundStep(d, m, state, w);
    Ensure(rec.loss <= rec.pair_term + tol::kNumeric * (1.0 + std::abs(rec.value_before)),
           "round: step lost more than 2 x_i x_j d(i,j)");
    Ensure(rec.progress_after < rec.progress_before,
           "round: f - q did not decrease");
    if (opts.verify_chain) {
      const ChainState fresh = BuildChain(m, state.x);
      Ensure(fresh.rings.size() == state.chain.rings.size(),
             "round: incremental chain is not maximal");
    }
    if (opts.observer) opts.observer(state, rec);
    trace.steps.push_back(std::move(rec));
  }

  const std::size_t total = trace.steps.size();
  for (std::size_t t = 0; t < total; ++t) {
    trace.total_loss += trace.steps[t].loss;
    trace.reverse_index_bounds.push_back(
        ReverseIndexBound(total - t, trace.rank, trace.start_quadratic));
  }

  for (const Ring& ring : state.chain.rings)
    result.basis.insert(result.basis.end(), ring.elements.begin(), ring.elements.end());
  std::sort(result.basis.begin(), result.basis.end());
  Ensure(result.basis.size() == trace.rank, "round: output is not a basis");
  Ensure(m.IsIndependent(result.basis), "round: output is not independent");
  result.x = std::move(state.x);
  return result;
}

}  // namespace divmax

#endif  // DIVMAX_CHAIN_ROUNDING_HPP_
