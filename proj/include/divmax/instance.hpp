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

// Instance documents (JSON, schema version 1) and reproducible generators.
//
// {
//   "schema_version": 1,
//   "n": 4,
//   "distance": {"kind": "l2", "points": [[0.0], [1.0], ...],
//                "transforms": [{"kind": "power", "parameter": 0.5}]},
//   "matroid": {"kind": "uniform", "k": 2},
//   "scores": [0.1, ...],          // optional, nonnegative
//   "seed": 7,                     // optional
//   "generator": {...}             // optional provenance
// }
//
// Distance kinds: l1, l2, lp (+ "p"), cosine (points); jaccard, dice,
// simple_matching, russell_rao (+ "sets", "universe_size"); explicit
// (+ "matrix", row-major list of rows). Matroid kinds: uniform ("k"),
// partition ("blocks", "capacities"), graphic ("vertices", "edges"),
// explicit_rank ("ranks", indexed by bitmask). Elements are 0-based.

#ifndef DIVMAX_INSTANCE_HPP_
#define DIVMAX_INSTANCE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "divmax/common.hpp"
#include "divmax/distance.hpp"
#include "divmax/matroid.hpp"
#include "divmax/rng.hpp"

namespace divmax {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct DistanceDoc {
  std::string kind = "explicit";
  double p = 2.0;
  std::vector<std::vector<double>> points;
  std::vector<Subset> sets;
  std::size_t universe_size = 0;
  std::vector<std::vector<double>> matrix;
  std::vector<Transform> transforms;
};

struct MatroidDoc {
  std::string kind = "uniform";
  std::size_t k = 0;
  std::vector<Subset> blocks;
  std::vector<std::size_t> capacities;
  std::size_t vertices = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<int> ranks;
};

struct InstanceDoc {
  std::size_t n = 0;
  DistanceDoc distance;
  MatroidDoc matroid;
  std::optional<std::vector<double>> scores;
  std::optional<std::uint64_t> seed;
  Json generator;  // null when absent
};

struct Instance {
  DistanceMatrix distance;
  MatroidSpec matroid;
  std::vector<double> scores;  // empty when the document has none
};

// Rounds to 12 significant digits, the precision stored in documents.
inline double CanonicalNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline DistanceMatrix MaterializeDistance(const DistanceDoc& doc) {
  std::optional<DistanceMatrix> d;
  if (auto kind = ParsePointDistance(doc.kind)) {
    d.emplace(BuildPointDistance(doc.points, *kind, doc.p));
  } else if (auto set_kind = ParseSetDistance(doc.kind)) {
    d.emplace(BuildSetDistance(doc.sets, *set_kind, doc.universe_size));
  } else if (doc.kind == "explicit") {
    d.emplace(DistanceMatrix::FromRows(doc.matrix));
  } else {
    throw InvalidInput("unknown distance kind '" + doc.kind + "'");
  }
  for (const Transform& t : doc.transforms) d.emplace(TransformDistance(*d, t));
  return *d;
}

inline MatroidSpec MaterializeMatroid(const MatroidDoc& doc, std::size_t n) {
  if (doc.kind == "uniform") return MatroidSpec::Uniform(n, doc.k);
  if (doc.kind == "partition")
    return MatroidSpec::Partition(n, doc.blocks, doc.capacities);
  if (doc.kind == "graphic") {
    Require(doc.edges.size() == n, "graphic matroid needs one edge per element");
    return MatroidSpec::Graphic(doc.vertices, doc.edges);
  }
  if (doc.kind == "explicit_rank") return MatroidSpec::ExplicitRank(n, doc.ranks);
  throw InvalidInput("unknown matroid kind '" + doc.kind + "'");
}

inline Instance Materialize(const InstanceDoc& doc) {
  DistanceMatrix d = MaterializeDistance(doc.distance);
  Require(d.size() == doc.n, "distance size does not match n");
  MatroidSpec m = MaterializeMatroid(doc.matroid, doc.n);
  std::vector<double> scores;
  if (doc.scores) {
    scores = *doc.scores;
    Require(scores.size() == doc.n, "scores must have length n");
    for (double s : scores)
      Require(std::isfinite(s) && s >= 0.0, "scores must be nonnegative");
  }
  return Instance{std::move(d), std::move(m), std::move(scores)};
}

// ---------------------------------------------------------------------------
// JSON.

namespace internal {

inline Json CanonicalArray(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(CanonicalNumber(x));
  return out;
}

inline Json CanonicalMatrix(const std::vector<std::vector<double>>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) out.push_back(CanonicalArray(r));
  return out;
}

template <typename T>
T Field(const Json& j, const char* key) {
  Require(j.is_object() && j.contains(key), std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T FieldOr(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return Field<T>(j, key);
}

}  // namespace internal

// Canonical JSON: sorted keys, floats rounded to 12 significant digits.
inline Json ToJson(const InstanceDoc& doc) {
  using internal::CanonicalArray;
  using internal::CanonicalMatrix;
  Json dist;
  dist["kind"] = doc.distance.kind;
  if (doc.distance.kind == "lp") dist["p"] = CanonicalNumber(doc.distance.p);
  if (ParsePointDistance(doc.distance.kind))
    dist["points"] = CanonicalMatrix(doc.distance.points);
  if (ParseSetDistance(doc.distance.kind)) {
    dist["sets"] = doc.distance.sets;
    dist["universe_size"] = doc.distance.universe_size;
  }
  if (doc.distance.kind == "explicit") dist["matrix"] = CanonicalMatrix(doc.distance.matrix);
  Json transforms = Json::array();
  for (const Transform& t : doc.distance.transforms) {
    Json tj{{"kind", std::string(Name(t.kind))}};
    if (t.kind == TransformKind::kPower || t.kind == TransformKind::kExpDecay)
      tj["parameter"] = CanonicalNumber(t.parameter);
    transforms.push_back(std::move(tj));
  }
  dist["transforms"] = std::move(transforms);

  Json mat;
  mat["kind"] = doc.matroid.kind;
  if (doc.matroid.kind == "uniform") mat["k"] = doc.matroid.k;
  if (doc.matroid.kind == "partition") {
    mat["blocks"] = doc.matroid.blocks;
    mat["capacities"] = doc.matroid.capacities;
  }
  if (doc.matroid.kind == "graphic") {
    mat["vertices"] = doc.matroid.vertices;
    Json edges = Json::array();
    for (const auto& [u, v] : doc.matroid.edges) edges.push_back({u, v});
    mat["edges"] = std::move(edges);
  }
  if (doc.matroid.kind == "explicit_rank") mat["ranks"] = doc.matroid.ranks;

  Json out;
  out["schema_version"] = kSchemaVersion;
  out["n"] = doc.n;
  out["distance"] = std::move(dist);
  out["matroid"] = std::move(mat);
  if (doc.scores) out["scores"] = CanonicalArray(*doc.scores);
  if (doc.seed) out["seed"] = *doc.seed;
  if (!doc.generator.is_null()) out["generator"] = doc.generator;
  return out;
}

inline InstanceDoc InstanceFromJson(const Json& j) {
  using internal::Field;
  using internal::FieldOr;
  Require(j.is_object(), "instance document must be a JSON object");
  const int version = FieldOr<int>(j, "schema_version", kSchemaVersion);
  Require(version == kSchemaVersion, "unsupported schema_version");

  InstanceDoc doc;
  doc.n = Field<std::size_t>(j, "n");
  const Json& dist = j.contains("distance") ? j.at("distance") : Json();
  Require(dist.is_object(), "missing 'distance' object");
  doc.distance.kind = Field<std::string>(dist, "kind");
  doc.distance.p = CanonicalNumber(FieldOr<double>(dist, "p", 2.0));
  if (ParsePointDistance(doc.distance.kind)) {
    doc.distance.points = Field<std::vector<std::vector<double>>>(dist, "points");
    for (auto& row : doc.distance.points)
      for (double& v : row) v = CanonicalNumber(v);
    Require(doc.distance.points.size() == doc.n, "need n points");
  } else if (ParseSetDistance(doc.distance.kind)) {
    doc.distance.sets = Field<std::vector<Subset>>(dist, "sets");
    doc.distance.universe_size = Field<std::size_t>(dist, "universe_size");
    Require(doc.distance.sets.size() == doc.n, "need n sets");
  } else if (doc.distance.kind == "explicit") {
    doc.distance.matrix = Field<std::vector<std::vector<double>>>(dist, "matrix");
    for (auto& row : doc.distance.matrix)
      for (double& v : row) v = CanonicalNumber(v);
  } else {
    throw InvalidInput("unknown distance kind '" + doc.distance.kind + "'");
  }
  if (dist.contains("transforms")) {
    Require(dist.at("transforms").is_array(), "'transforms' must be an array");
    for (const Json& tj : dist.at("transforms")) {
      const auto name = Field<std::string>(tj, "kind");
      const auto kind = ParseTransformKind(name);
      Require(kind.has_value(), "unknown transform '" + name + "'");
      doc.distance.transforms.push_back(
          {*kind, CanonicalNumber(FieldOr<double>(tj, "parameter", 1.0))});
    }
  }

  const Json& mat = j.contains("matroid") ? j.at("matroid") : Json();
  Require(mat.is_object(), "missing 'matroid' object");
  doc.matroid.kind = Field<std::string>(mat, "kind");
  if (doc.matroid.kind == "uniform") {
    doc.matroid.k = Field<std::size_t>(mat, "k");
  } else if (doc.matroid.kind == "partition") {
    doc.matroid.blocks = Field<std::vector<Subset>>(mat, "blocks");
    doc.matroid.capacities = Field<std::vector<std::size_t>>(mat, "capacities");
  } else if (doc.matroid.kind == "graphic") {
    doc.matroid.vertices = Field<std::size_t>(mat, "vertices");
    for (const auto& e : Field<std::vector<std::vector<std::size_t>>>(mat, "edges")) {
      Require(e.size() == 2, "graphic edges are [u, v] pairs");
      doc.matroid.edges.emplace_back(e[0], e[1]);
    }
  } else if (doc.matroid.kind == "explicit_rank") {
    doc.matroid.ranks = Field<std::vector<int>>(mat, "ranks");
  } else {
    throw InvalidInput("unknown matroid kind '" + doc.matroid.kind + "'");
  }

  if (j.contains("scores")) {
    auto scores = Field<std::vector<double>>(j, "scores");
    for (double& v : scores) v = CanonicalNumber(v);
    doc.scores = std::move(scores);
  }
  if (j.contains("seed")) doc.seed = Field<std::uint64_t>(j, "seed");
  if (j.contains("generator")) doc.generator = j.at("generator");
  return doc;
}

inline std::string Serialize(const InstanceDoc& doc) { return ToJson(doc).dump(2) + "\n"; }

inline InstanceDoc Deserialize(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
  return InstanceFromJson(j);
}

// ---------------------------------------------------------------------------
// Generators.

struct RandomPointsOptions {
  std::size_t n = 8;
  std::size_t dim = 2;
  std::string kind = "l2";
  std::string distribution = "gaussian";  // or "cube"
  double p = 1.5;                         // for kind "lp"
  std::size_t universe_size = 20;         // set kinds
  std::size_t set_size = 5;               // set kinds
  std::string matroid = "uniform";        // or "partition"
  std::size_t k = 3;                      // uniform rank
  std::size_t blocks = 2;                 // partition block count
  bool with_scores = false;
};

// Uniform-cube or Gaussian points (or random fixed-size sets) with a
// uniform or random partition matroid. Partition blocks are contiguous runs
// of a random permutation; capacities are uniform in [1, |block|].
inline InstanceDoc GenRandomPoints(const RandomPointsOptions& o, std::uint64_t seed) {
  Require(o.n >= 2, "random points: need n >= 2");
  CounterRng rng(seed);
  InstanceDoc doc;
  doc.n = o.n;
  doc.seed = seed;
  doc.distance.kind = o.kind;
  if (ParsePointDistance(o.kind)) {
    Require(o.dim >= 1, "random points: need dim >= 1");
    std::normal_distribution<double> gauss(0.0, 1.0);
    doc.distance.p = o.p;
    for (std::size_t i = 0; i < o.n; ++i) {
      std::vector<double> v(o.dim);
      for (double& c : v) {
        do {
          c = o.distribution == "cube" ? rng.Uniform() : gauss(rng);
          c = CanonicalNumber(c);
        } while (o.kind == "cosine" && c == 0.0);
      }
      doc.distance.points.push_back(std::move(v));
    }
  } else if (ParseSetDistance(o.kind)) {
    Require(o.set_size <= o.universe_size, "random sets: set_size exceeds the universe");
    doc.distance.universe_size = o.universe_size;
    std::vector<Index> universe(o.universe_size);
    std::iota(universe.begin(), universe.end(), Index{0});
    for (std::size_t i = 0; i < o.n; ++i) {
      std::shuffle(universe.begin(), universe.end(), rng);
      doc.distance.sets.push_back(
          Normalize(Subset(universe.begin(), universe.begin() + static_cast<std::ptrdiff_t>(o.set_size))));
    }
  } else {
    throw InvalidInput("random points: unsupported kind '" + o.kind + "'");
  }

  doc.matroid.kind = o.matroid;
  if (o.matroid == "uniform") {
    Require(o.k <= o.n, "random points: k exceeds n");
    doc.matroid.k = o.k;
  } else if (o.matroid == "partition") {
    Require(o.blocks >= 1 && o.blocks <= o.n, "random points: need 1 <= blocks <= n");
    std::vector<Index> order(o.n);
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t b = 0; b < o.blocks; ++b) {
      const std::size_t lo = b * o.n / o.blocks;
      const std::size_t hi = (b + 1) * o.n / o.blocks;
      Subset block = Normalize(Subset(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                      order.begin() + static_cast<std::ptrdiff_t>(hi)));
      std::uniform_int_distribution<std::size_t> cap(1, block.size());
      doc.matroid.capacities.push_back(cap(rng));
      doc.matroid.blocks.push_back(std::move(block));
    }
  } else {
    throw InvalidInput("random points: unsupported matroid '" + o.matroid + "'");
  }

  if (o.with_scores) {
    std::vector<double> w(o.n);
    for (double& v : w) v = CanonicalNumber(rng.Uniform());
    doc.scores = std::move(w);
  }
  doc.generator = {{"name", "random_points"}, {"dim", o.dim}, {"distribution", o.distribution}};
  return doc;
}

// All-ones off-diagonal distance with a rank-k uniform matroid: every k-set
// scores k(k-1) while the uniform point k/n scores k^2 (n-1)/n.
inline InstanceDoc GenIntegralityGap(std::size_t n, std::size_t k) {
  Require(k >= 2 && k <= n, "integrality gap: need 2 <= k <= n");
  InstanceDoc doc;
  doc.n = n;
  doc.distance.kind = "explicit";
  doc.distance.matrix.assign(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i) doc.distance.matrix[i][i] = 0.0;
  doc.matroid.kind = "uniform";
  doc.matroid.k = k;
  doc.seed = 0;
  doc.generator = {{"name", "integrality_gap"}, {"k", k}};
  return doc;
}

// Densest-k-subgraph instance: distance 2 on edges and 1 elsewhere, raised
// to log2(n/(n-1)), so edges sit at 1 + 1/(n-1) and the MSD optimum is a
// densest k-subgraph.
inline InstanceDoc GenDksReduction(std::size_t vertices,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                   std::size_t k) {
  Require(vertices >= 2, "dks reduction: need n >= 2");
  Require(k <= vertices, "dks reduction: k exceeds n");
  InstanceDoc doc;
  doc.n = vertices;
  doc.distance.kind = "explicit";
  doc.distance.matrix.assign(vertices, std::vector<double>(vertices, 1.0));
  for (std::size_t i = 0; i < vertices; ++i) doc.distance.matrix[i][i] = 0.0;
  Json edge_list = Json::array();
  for (const auto& [u, v] : edges) {
    Require(u < vertices && v < vertices && u != v, "dks reduction: bad edge");
    doc.distance.matrix[u][v] = doc.distance.matrix[v][u] = 2.0;
    edge_list.push_back({u, v});
  }
  doc.distance.transforms.push_back({TransformKind::kMetricPower, 1.0});
  doc.matroid.kind = "uniform";
  doc.matroid.k = k;
  doc.seed = 0;
  doc.generator = {{"name", "dks_reduction"}, {"edges", edge_list}};
  return doc;
}

// G(n, p) edge list.
inline std::vector<std::pair<std::size_t, std::size_t>> RandomGraph(std::size_t n, double p,
                                                                    std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (rng.Uniform() < p) edges.emplace_back(u, v);
  return edges;
}

}  // namespace divmax

#endif  // DIVMAX_INSTANCE_HPP_
