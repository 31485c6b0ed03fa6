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

#ifndef DIVMAX_SCHOENBERG_HPP_
#define DIVMAX_SCHOENBERG_HPP_

#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "divmax/common.hpp"
#include "divmax/distance.hpp"

namespace divmax {

// Gram matrix Q and squared norms c of an embedding of sqrt(d) that places
// `base_point` at the origin. On the slice sum(x) = alpha,
//   x^T D x = 2 alpha c^T x - 2 x^T Q x.
struct SchoenbergForm {
  Eigen::MatrixXd q;
  Eigen::VectorXd c;
  Index base_point = 0;

  double SliceValue(std::span<const double> x) const {
    const Eigen::Map<const Eigen::VectorXd> v(x.data(),
                                              static_cast<Eigen::Index>(x.size()));
    const double alpha = v.sum();
    return 2.0 * alpha * c.dot(v) - 2.0 * v.dot(q * v);
  }
};

inline SchoenbergForm MakeSchoenbergForm(const DistanceMatrix& d,
                                         Index base_point = 0) {
  const std::size_t n = d.size();
  Require(base_point < n, "schoenberg form: base point out of range");
  SchoenbergForm form;
  form.base_point = base_point;
  form.c = d.matrix().row(static_cast<Eigen::Index>(base_point)).transpose();
  form.q.resize(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      form.q(i, j) = 0.5 * (form.c(i) + form.c(j) - d(i, j));
  return form;
}

enum class Verdict { kNegativeType, kNotNegativeType };

struct NegTypeCertificate {
  Verdict verdict = Verdict::kNegativeType;
  double min_eigenvalue = 0.0;
  double tolerance = 0.0;
  // Present iff kNotNegativeType: sum(b) = 0 and b^T D b > 0.
  std::optional<std::vector<double>> witness;
  double witness_value = 0.0;

  bool negative_type() const { return verdict == Verdict::kNegativeType; }
};

// b^T D b.
inline double QuadraticForm(const DistanceMatrix& d, std::span<const double> b) {
  const Eigen::Map<const Eigen::VectorXd> v(b.data(),
                                            static_cast<Eigen::Index>(b.size()));
  return v.dot(d.matrix() * v);
}

// Negative type holds iff the Schoenberg Gram matrix is PSD. The smallest
// eigenvalue is compared against -1e-8 (1 + ||Q||_inf); on failure the
// offending eigenvector becomes a negative-type inequality violation.
inline NegTypeCertificate CertifyNegativeType(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  const Index base = 0;
  const SchoenbergForm form = MakeSchoenbergForm(d, base);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(form.q);
  Ensure(solver.info() == Eigen::Success, "eigen-decomposition failed");

  NegTypeCertificate cert;
  cert.min_eigenvalue = solver.eigenvalues()(0);
  cert.tolerance =
      tol::kPsdScale * (1.0 + form.q.cwiseAbs().rowwise().sum().maxCoeff());
  if (cert.min_eigenvalue >= -cert.tolerance) return cert;

  cert.verdict = Verdict::kNotNegativeType;
  Eigen::VectorXd u = solver.eigenvectors().col(0);
  // Scale so the largest-magnitude entry (lowest index on ties) is +1.
  Eigen::Index pivot = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (std::abs(u(i)) > std::abs(u(pivot)) * (1.0 + 1e-12)) pivot = i;
  u /= u(pivot);
  // Snap near-integers so hand-checkable witnesses come out exact.
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double r = std::round(u(i));
    if (std::abs(u(i) - r) <= 1e-9) u(i) = r;
  }

  std::vector<double> b(n, 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == base) continue;
    b[i] = u(static_cast<Eigen::Index>(i));
    sum += b[i];
  }
  b[base] = -sum;
  cert.witness_value = QuadraticForm(d, b);
  cert.witness = std::move(b);
  return cert;
}

// A distance matrix together with the certificate that licenses the concave
// slice relaxation. Forcing skips that license and voids all guarantees.
class NegTypeDistance {
 public:
  static NegTypeDistance Certify(DistanceMatrix d) {
    NegTypeCertificate cert = CertifyNegativeType(d);
    if (!cert.negative_type()) {
      throw NotNegativeType("distance matrix is not of negative type (min eigenvalue " +
                            std::to_string(cert.min_eigenvalue) + ")");
    }
    return NegTypeDistance(std::move(d), std::move(cert), false);
  }

  static NegTypeDistance Force(DistanceMatrix d) {
    NegTypeCertificate cert = CertifyNegativeType(d);
    return NegTypeDistance(std::move(d), std::move(cert), true);
  }

  const DistanceMatrix& distance() const { return d_; }
  const NegTypeCertificate& certificate() const { return cert_; }
  bool forced() const { return forced_; }
  std::size_t size() const { return d_.size(); }

 private:
  NegTypeDistance(DistanceMatrix d, NegTypeCertificate cert, bool forced)
      : d_(std::move(d)), cert_(std::move(cert)), forced_(forced) {}

  DistanceMatrix d_;
  NegTypeCertificate cert_;
  bool forced_;
};

}  // namespace divmax

#endif  // DIVMAX_SCHOENBERG_HPP_
