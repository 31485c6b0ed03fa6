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

// Distance matrices over a finite ground set: the catalogue of negative-type
// distances, entrywise transforms that preserve negative type, and the
// dispersion objective x^T D x + w^T x.

#ifndef DIVMAX_DISTANCE_HPP_
#define DIVMAX_DISTANCE_HPP_

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "divmax/common.hpp"

namespace divmax {

// Symmetric, nonnegative, zero-diagonal n x n matrix with n >= 2.
class DistanceMatrix {
 public:
  // Validates and symmetrizes `d`. Entries that are asymmetric beyond a
  // relative 1e-9, negative, or a nonzero diagonal are rejected.
  explicit DistanceMatrix(Eigen::MatrixXd d) : d_(std::move(d)) {
    Require(d_.rows() == d_.cols(), "distance matrix must be square");
    Require(d_.rows() >= 2, "distance matrix needs n >= 2");
    const Eigen::Index n = d_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      Require(std::isfinite(d_(i, i)) && std::abs(d_(i, i)) <= tol::kNumeric,
              "distance matrix diagonal must be zero");
      d_(i, i) = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double a = d_(i, j);
        const double b = d_(j, i);
        Require(std::isfinite(a) && std::isfinite(b),
                "distance matrix entries must be finite");
        Require(a >= 0.0 && b >= 0.0, "distances must be nonnegative");
        Require(std::abs(a - b) <= tol::kNumeric * (1.0 + std::max(a, b)),
                "distance matrix must be symmetric");
        d_(i, j) = d_(j, i) = 0.5 * (a + b);
      }
    }
  }

  static DistanceMatrix FromRows(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    Eigen::MatrixXd d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      Require(rows[i].size() == n, "distance matrix rows must have length n");
      for (std::size_t j = 0; j < n; ++j) d(i, j) = rows[i][j];
    }
    return DistanceMatrix(std::move(d));
  }

  std::size_t size() const { return static_cast<std::size_t>(d_.rows()); }
  double operator()(Index i, Index j) const { return d_(i, j); }
  const Eigen::MatrixXd& matrix() const { return d_; }

  std::vector<std::vector<double>> ToRows() const {
    std::vector<std::vector<double>> rows(size(), std::vector<double>(size()));
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < size(); ++j) rows[i][j] = d_(i, j);
    return rows;
  }

  // True when d(i,j) <= d(i,l) + d(l,j) for all triples, up to tol::kMetric.
  bool IsMetric() const {
    const Eigen::Index n = d_.rows();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        for (Eigen::Index l = 0; l < n; ++l) {
          if (d_(i, j) > d_(i, l) + d_(l, j) +
                             tol::kMetric * (1.0 + d_(i, j))) {
            return false;
          }
        }
    return true;
  }

 private:
  Eigen::MatrixXd d_;
};

// ---------------------------------------------------------------------------
// Catalogue.

enum class PointDistance { kL1, kL2, kLp, kCosine };
enum class SetDistance { kJaccard, kDice, kSimpleMatching, kRussellRao };

inline std::optional<PointDistance> ParsePointDistance(std::string_view s) {
  if (s == "l1") return PointDistance::kL1;
  if (s == "l2") return PointDistance::kL2;
  if (s == "lp") return PointDistance::kLp;
  if (s == "cosine") return PointDistance::kCosine;
  return std::nullopt;
}

inline std::optional<SetDistance> ParseSetDistance(std::string_view s) {
  if (s == "jaccard") return SetDistance::kJaccard;
  if (s == "dice") return SetDistance::kDice;
  if (s == "simple_matching") return SetDistance::kSimpleMatching;
  if (s == "russell_rao") return SetDistance::kRussellRao;
  return std::nullopt;
}

inline std::string_view Name(PointDistance kind) {
  switch (kind) {
    case PointDistance::kL1: return "l1";
    case PointDistance::kL2: return "l2";
    case PointDistance::kLp: return "lp";
    case PointDistance::kCosine: return "cosine";
  }
  return "";
}

inline std::string_view Name(SetDistance kind) {
  switch (kind) {
    case SetDistance::kJaccard: return "jaccard";
    case SetDistance::kDice: return "dice";
    case SetDistance::kSimpleMatching: return "simple_matching";
    case SetDistance::kRussellRao: return "russell_rao";
  }
  return "";
}

// Distances between real vectors. `p` is only read for kLp and must lie in
// [1, 2]. Cosine distance is the enclosed angle in [0, pi].
inline DistanceMatrix BuildPointDistance(
    const std::vector<std::vector<double>>& points, PointDistance kind,
    double p = 2.0) {
  const std::size_t n = points.size();
  Require(n >= 2, "need at least two points");
  const std::size_t dim = points.front().size();
  for (const auto& v : points) {
    Require(v.size() == dim, "points must share one dimension");
    for (double c : v) Require(std::isfinite(c), "point coordinates must be finite");
  }
  if (kind == PointDistance::kL1) p = 1.0;
  if (kind == PointDistance::kL2) p = 2.0;
  if (kind == PointDistance::kLp) {
    Require(p >= 1.0 && p <= 2.0, "lp distance needs 1 <= p <= 2");
  }
  std::vector<double> norms(n, 0.0);
  if (kind == PointDistance::kCosine) {
    for (std::size_t i = 0; i < n; ++i) {
      double sq = 0.0;
      for (double c : points[i]) sq += c * c;
      norms[i] = std::sqrt(sq);
      Require(norms[i] > 0.0, "cosine distance rejects the zero vector");
    }
  }

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double value = 0.0;
      if (kind == PointDistance::kCosine) {
        double dot = 0.0;
        for (std::size_t t = 0; t < dim; ++t) dot += points[i][t] * points[j][t];
        const double cosine = std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
        value = std::acos(cosine);
      } else if (p == 1.0) {
        for (std::size_t t = 0; t < dim; ++t)
          value += std::abs(points[i][t] - points[j][t]);
      } else if (p == 2.0) {
        for (std::size_t t = 0; t < dim; ++t) {
          const double diff = points[i][t] - points[j][t];
          value += diff * diff;
        }
        value = std::sqrt(value);
      } else {
        for (std::size_t t = 0; t < dim; ++t)
          value += std::pow(std::abs(points[i][t] - points[j][t]), p);
        value = std::pow(value, 1.0 / p);
      }
      d(i, j) = d(j, i) = value;
    }
  }
  return DistanceMatrix(std::move(d));
}

// Distances between finite subsets of the universe {0, ..., universe_size-1}.
// Two empty sets are at distance 0 under jaccard and dice.
inline DistanceMatrix BuildSetDistance(const std::vector<Subset>& sets,
                                       SetDistance kind,
                                       std::size_t universe_size) {
  const std::size_t n = sets.size();
  Require(n >= 2, "need at least two sets");
  Require(universe_size >= 1, "set distances need a nonempty universe");
  std::vector<Subset> normalized;
  normalized.reserve(n);
  for (const auto& s : sets) {
    Subset t = Normalize(s);
    for (Index e : t) Require(e < universe_size, "set element outside universe");
    normalized.push_back(std::move(t));
  }

  const double u = static_cast<double>(universe_size);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = normalized[i];
      const auto& b = normalized[j];
      Subset common;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                            std::back_inserter(common));
      const double inter = static_cast<double>(common.size());
      const double sum = static_cast<double>(a.size() + b.size());
      const double sym = sum - 2.0 * inter;
      double value = 0.0;
      switch (kind) {
        case SetDistance::kJaccard:
          value = (sum - inter) > 0.0 ? 1.0 - inter / (sum - inter) : 0.0;
          break;
        case SetDistance::kDice:
          value = sum > 0.0 ? sym / sum : 0.0;
          break;
        case SetDistance::kSimpleMatching:
          value = sym / u;
          break;
        case SetDistance::kRussellRao:
          value = 1.0 - inter / u;
          break;
      }
      d(i, j) = d(j, i) = value;
    }
  }
  return DistanceMatrix(std::move(d));
}

// ---------------------------------------------------------------------------
// Transforms f with f(0) = 0 applied entrywise.

enum class TransformKind { kPower, kRatio, kLog1p, kExpDecay, kMetricPower };

struct Transform {
  TransformKind kind = TransformKind::kRatio;
  double parameter = 1.0;  // exponent for kPower, rate for kExpDecay
};

inline std::optional<TransformKind> ParseTransformKind(std::string_view s) {
  if (s == "power") return TransformKind::kPower;
  if (s == "ratio") return TransformKind::kRatio;
  if (s == "log1p") return TransformKind::kLog1p;
  if (s == "exp_decay") return TransformKind::kExpDecay;
  if (s == "metric_power") return TransformKind::kMetricPower;
  return std::nullopt;
}

inline std::string_view Name(TransformKind kind) {
  switch (kind) {
    case TransformKind::kPower: return "power";
    case TransformKind::kRatio: return "ratio";
    case TransformKind::kLog1p: return "log1p";
    case TransformKind::kExpDecay: return "exp_decay";
    case TransformKind::kMetricPower: return "metric_power";
  }
  return "";
}

// Exponent log2(n / (n - 1)) that maps any metric on n points to a
// negative-type distance.
inline double MetricPowerExponent(std::size_t n) {
  const double nn = static_cast<double>(n);
  return std::log2(nn / (nn - 1.0));
}

inline DistanceMatrix TransformDistance(const DistanceMatrix& d,
                                        const Transform& t) {
  double exponent = t.parameter;
  switch (t.kind) {
    case TransformKind::kPower:
      Require(t.parameter > 0.0 && t.parameter <= 1.0,
              "power transform needs an exponent in (0, 1]");
      break;
    case TransformKind::kExpDecay:
      Require(t.parameter > 0.0, "exp_decay transform needs lambda > 0");
      break;
    case TransformKind::kMetricPower:
      Require(d.IsMetric(), "metric_power transform needs a metric input");
      exponent = MetricPowerExponent(d.size());
      break;
    default:
      break;
  }
  Eigen::MatrixXd out = d.matrix();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      const double x = out(i, j);
      if (i == j) continue;
      switch (t.kind) {
        case TransformKind::kPower:
        case TransformKind::kMetricPower:
          out(i, j) = x == 0.0 ? 0.0 : std::pow(x, exponent);
          break;
        case TransformKind::kRatio:
          out(i, j) = x / (1.0 + x);
          break;
        case TransformKind::kLog1p:
          out(i, j) = std::log1p(x);
          break;
        case TransformKind::kExpDecay:
          out(i, j) = -std::expm1(-t.parameter * x);
          break;
      }
    }
  }
  return DistanceMatrix(std::move(out));
}

// ---------------------------------------------------------------------------
// Objective.

// x^T D x + w^T x. Ordered pairs, so a set scores twice its unordered sum.
inline double Dispersion(const DistanceMatrix& d, std::span<const double> x,
                         std::span<const double> w = {}) {
  const std::size_t n = d.size();
  Require(x.size() == n, "dispersion: x has the wrong length");
  Require(w.empty() || w.size() == n, "dispersion: scores have the wrong length");
  const Eigen::MatrixXd& m = d.matrix();
  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += m(i, j) * x[j];
    value += x[i] * row;
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    Require(w[i] >= 0.0, "dispersion: scores must be nonnegative");
    value += w[i] * x[i];
  }
  return value;
}

inline double SetDispersion(const DistanceMatrix& d, std::span<const Index> s,
                            std::span<const double> w = {}) {
  double value = 0.0;
  for (Index i : s)
    for (Index j : s) value += d(i, j);
  if (!w.empty())
    for (Index i : s) value += w[i];
  return value;
}

// Compares (x^{A∪B})^T D x^{A∪B} / |x^{A∪B}| against the sum of the same
// normalized dispersions over A and B.
struct UnionInequality {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

inline UnionInequality CheckUnionInequality(const DistanceMatrix& d,
                                            std::span<const double> x,
                                            const Subset& a_in,
                                            const Subset& b_in) {
  const std::size_t n = d.size();
  Require(x.size() == n, "union inequality: x has the wrong length");
  const Subset a = Normalize(a_in);
  const Subset b = Normalize(b_in);
  for (Index e : a) Require(e < n, "union inequality: index out of range");
  for (Index e : b) Require(e < n, "union inequality: index out of range");
  for (Index e : a)
    Require(!Contains(b, e), "union inequality: A and B must be disjoint");

  auto restricted = [&](const Subset& s) {
    std::vector<double> r(n, 0.0);
    for (Index e : s) r[e] = x[e];
    return r;
  };
  const double mass_a = Mass(x, a);
  const double mass_b = Mass(x, b);
  Require(mass_a > 0.0 && mass_b > 0.0,
          "union inequality: both sides need positive mass");

  const double disp_a = Dispersion(d, restricted(a));
  const double disp_b = Dispersion(d, restricted(b));
  const double disp_ab = Dispersion(d, restricted(Union(a, b)));

  UnionInequality result;
  result.lhs = disp_ab / (mass_a + mass_b);
  result.rhs = disp_a / mass_a + disp_b / mass_b;
  result.holds = result.lhs >=
                 result.rhs - tol::kNumeric * (1.0 + std::abs(result.rhs));
  return result;
}

}  // namespace divmax

#endif  // DIVMAX_DISTANCE_HPP_
