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

// Matroids over {0, ..., n-1} given by a rank oracle.

#ifndef DIVMAX_MATROID_HPP_
#define DIVMAX_MATROID_HPP_

#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "divmax/common.hpp"

namespace divmax {

struct UniformMatroid {
  std::size_t k = 0;
};

struct PartitionMatroid {
  std::vector<Subset> blocks;
  std::vector<std::size_t> capacities;
  std::vector<std::size_t> block_of;  // filled by MatroidSpec
};

// Elements are the edges; independent sets are forests.
struct GraphicMatroid {
  std::size_t vertices = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

// ranks[mask] = r(S) for the subset whose bit e is set iff e in S.
struct ExplicitRankMatroid {
  std::vector<int> ranks;
};

inline constexpr std::size_t kMaxExplicitRankSize = 20;

class MatroidSpec {
 public:
  using Kind = std::variant<UniformMatroid, PartitionMatroid, GraphicMatroid,
                            ExplicitRankMatroid>;

  static MatroidSpec Uniform(std::size_t n, std::size_t k) {
    Require(k <= n, "uniform matroid needs k <= n");
    return MatroidSpec(n, UniformMatroid{k});
  }

  static MatroidSpec Partition(std::size_t n, std::vector<Subset> blocks,
                               std::vector<std::size_t> capacities) {
    Require(blocks.size() == capacities.size(),
            "partition matroid: one capacity per block");
    PartitionMatroid p;
    p.block_of.assign(n, n);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      Subset block = Normalize(blocks[b]);
      Require(!block.empty(), "partition matroid: empty block");
      Require(capacities[b] <= block.size(),
              "partition matroid: capacity exceeds block size");
      for (Index e : block) {
        Require(e < n, "partition matroid: element out of range");
        Require(p.block_of[e] == n, "partition matroid: blocks overlap");
        p.block_of[e] = b;
      }
      p.blocks.push_back(std::move(block));
    }
    for (std::size_t e = 0; e < n; ++e)
      Require(p.block_of[e] != n, "partition matroid: blocks must cover the ground set");
    p.capacities = std::move(capacities);
    return MatroidSpec(n, std::move(p));
  }

  static MatroidSpec Graphic(std::size_t vertices,
                             std::vector<std::pair<std::size_t, std::size_t>> edges) {
    for (const auto& [u, v] : edges)
      Require(u < vertices && v < vertices, "graphic matroid: vertex out of range");
    const std::size_t n = edges.size();
    return MatroidSpec(n, GraphicMatroid{vertices, std::move(edges)});
  }

  // Validates the rank axioms exhaustively.
  static MatroidSpec ExplicitRank(std::size_t n, std::vector<int> ranks) {
    Require(n <= kMaxExplicitRankSize, "explicit rank matroid needs n <= 20");
    Require(ranks.size() == (std::size_t{1} << n),
            "explicit rank table needs 2^n entries");
    Require(ranks[0] == 0, "rank of the empty set must be 0");
    const std::uint32_t full = static_cast<std::uint32_t>(ranks.size());
    for (std::uint32_t s = 0; s < full; ++s) {
      Require(ranks[s] >= 0 && ranks[s] <= std::popcount(s),
              "rank must lie in [0, |S|]");
      for (std::size_t a = 0; a < n; ++a) {
        const std::uint32_t sa = s | (1u << a);
        if (sa == s) continue;
        Require(ranks[sa] >= ranks[s] && ranks[sa] <= ranks[s] + 1,
                "rank must be monotone with unit increments");
        for (std::size_t b = a + 1; b < n; ++b) {
          const std::uint32_t sb = s | (1u << b);
          if (sb == s) continue;
          Require(ranks[sa] + ranks[sb] >= ranks[sa | sb] + ranks[s],
                  "rank must be submodular");
        }
      }
    }
    return MatroidSpec(n, ExplicitRankMatroid{std::move(ranks)});
  }

  std::size_t size() const { return n_; }
  const Kind& kind() const { return kind_; }

  bool is_uniform() const { return std::holds_alternative<UniformMatroid>(kind_); }
  bool is_partition() const { return std::holds_alternative<PartitionMatroid>(kind_); }
  // Uniform and partition matroids have closed-form slack minimization.
  bool has_closed_form() const { return is_uniform() || is_partition(); }

  std::size_t Rank(std::span<const Index> s) const {
    for (Index e : s) Require(e < n_, "rank: element out of range");
    return std::visit([&](const auto& m) { return RankOf(m, s); }, kind_);
  }

  // Rank of a subset given as a bitmask (n <= 64).
  std::size_t RankMask(std::uint64_t mask) const {
    if (const auto* m = std::get_if<ExplicitRankMatroid>(&kind_))
      return static_cast<std::size_t>(m->ranks[mask]);
    Subset s;
    while (mask) {
      s.push_back(static_cast<Index>(std::countr_zero(mask)));
      mask &= mask - 1;
    }
    return Rank(s);
  }

  std::size_t FullRank() const { return full_rank_; }

  bool IsIndependent(std::span<const Index> s) const {
    const Subset t = Normalize(Subset(s.begin(), s.end()));
    return t.size() == s.size() && Rank(t) == t.size();
  }

 private:
  MatroidSpec(std::size_t n, Kind kind) : n_(n), kind_(std::move(kind)) {
    Subset all(n_);
    std::iota(all.begin(), all.end(), Index{0});
    full_rank_ = Rank(all);
  }

  std::size_t RankOf(const UniformMatroid& m, std::span<const Index> s) const {
    return std::min(s.size(), m.k);
  }

  std::size_t RankOf(const PartitionMatroid& m, std::span<const Index> s) const {
    std::vector<std::size_t> count(m.blocks.size(), 0);
    for (Index e : s) ++count[m.block_of[e]];
    std::size_t r = 0;
    for (std::size_t b = 0; b < count.size(); ++b)
      r += std::min(count[b], m.capacities[b]);
    return r;
  }

  // |S| minus the number of edges closing a cycle.
  std::size_t RankOf(const GraphicMatroid& m, std::span<const Index> s) const {
    std::vector<std::size_t> parent(m.vertices);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
      while (parent[v] != v) {
        parent[v] = parent[parent[v]];
        v = parent[v];
      }
      return v;
    };
    std::size_t r = 0;
    for (Index e : s) {
      const auto [u, v] = m.edges[e];
      const std::size_t ru = find(u);
      const std::size_t rv = find(v);
      if (ru == rv) continue;
      parent[ru] = rv;
      ++r;
    }
    return r;
  }

  std::size_t RankOf(const ExplicitRankMatroid& m, std::span<const Index> s) const {
    std::uint32_t mask = 0;
    for (Index e : s) mask |= 1u << e;
    return static_cast<std::size_t>(m.ranks[mask]);
  }

  std::size_t n_;
  Kind kind_;
  std::size_t full_rank_ = 0;
};

// Maximum-weight basis of the rank-`alpha` truncation: elements by weight
// descending (lowest index on ties), added while independent, stopping at
// `alpha` elements. The result maximizes w^T x over P(M) ∩ {sum(x) = alpha}.
inline Subset GreedyBasisLmo(const MatroidSpec& m, std::size_t alpha,
                             std::span<const double> w) {
  const std::size_t n = m.size();
  Require(w.size() == n, "greedy: weight vector has the wrong length");
  Require(alpha <= m.FullRank(), "greedy: alpha exceeds the matroid rank");
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return w[a] > w[b]; });

  Subset chosen;
  chosen.reserve(alpha);
  if (const auto* u = std::get_if<UniformMatroid>(&m.kind())) {
    (void)u;
    chosen.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(alpha));
  } else if (const auto* p = std::get_if<PartitionMatroid>(&m.kind())) {
    std::vector<std::size_t> used(p->blocks.size(), 0);
    for (Index e : order) {
      if (chosen.size() == alpha) break;
      const std::size_t b = p->block_of[e];
      if (used[b] < p->capacities[b]) {
        ++used[b];
        chosen.push_back(e);
      }
    }
  } else {
    for (Index e : order) {
      if (chosen.size() == alpha) break;
      Subset candidate = chosen;
      candidate.push_back(e);
      std::sort(candidate.begin(), candidate.end());
      if (m.Rank(candidate) == candidate.size()) chosen.push_back(e);
    }
  }
  Ensure(chosen.size() == alpha, "greedy: could not reach the requested size");
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace divmax

#endif  // DIVMAX_MATROID_HPP_
