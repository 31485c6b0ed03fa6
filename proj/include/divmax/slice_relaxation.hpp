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

// Concave relaxation of max-sum dispersion, one slice sum(x) = alpha at a
// time. On a negative-type distance the objective x^T D x + w^T x is concave
// on every slice, and P(M) ∩ {sum(x) = alpha} is the base polytope of the
// rank-alpha truncation, so the matroid greedy algorithm is an exact linear
// maximization oracle. Each slice is solved by conditional gradient with
// away steps and exact line search; the Frank-Wolfe gap bounds the distance
// to the slice optimum.

#ifndef DIVMAX_SLICE_RELAXATION_HPP_
#define DIVMAX_SLICE_RELAXATION_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <span>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "divmax/common.hpp"
#include "divmax/distance.hpp"
#include "divmax/matroid.hpp"
#include "divmax/schoenberg.hpp"

namespace divmax {

struct SliceOptions {
  double gap_tolerance = 1e-6;  // relative to max(1, |value|)
  std::size_t max_iterations = 0;  // 0 selects 50 n alpha
  std::size_t threads = 1;
  bool record_history = false;  // keep the objective after every step
};

struct SliceSolution {
  std::size_t alpha = 0;
  std::vector<double> x;
  double value = 0.0;
  double gap = 0.0;
  double upper_bound = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

struct RelaxationResult {
  SliceSolution best;
  std::vector<SliceSolution> per_slice;
  double opt_upper_bound = 0.0;
};

namespace internal {

class AwayStepSolver {
 public:
  AwayStepSolver(const DistanceMatrix& d, const MatroidSpec& m,
                 std::span<const double> w, std::size_t alpha)
      : d_(d.matrix()), m_(m), n_(m.size()), alpha_(alpha) {
    w_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < w.size(); ++i) w_(static_cast<Eigen::Index>(i)) = w[i];
  }

  SliceSolution Solve(const SliceOptions& opts,
                      std::span<const double> start_weights) {
    const std::size_t cap = opts.max_iterations > 0 ? opts.max_iterations
                                                    : 50 * n_ * alpha_;
    Subset start = GreedyBasisLmo(m_, alpha_, start_weights);
    atoms_.clear();
    atoms_.push_back({start, 1.0, Image(start)});
    x_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
    for (Index e : start) x_(static_cast<Eigen::Index>(e)) = 1.0;
    dx_ = atoms_.front().image;

    SliceSolution out;
    out.alpha = alpha_;
    double value = Value();
    if (opts.record_history) out.history.push_back(value);
    std::size_t it = 0;
    double gap = 0.0;
    for (;; ++it) {
      const Eigen::VectorXd grad = 2.0 * dx_ + w_;
      std::vector<double> g(grad.data(), grad.data() + grad.size());
      const Subset fw_vertex = GreedyBasisLmo(m_, alpha_, g);
      const double x_dot = grad.dot(x_);
      gap = std::max(0.0, VertexDot(grad, fw_vertex) - x_dot);
      if (gap <= opts.gap_tolerance * std::max(1.0, std::abs(value))) {
        out.converged = true;
        break;
      }
      if (it >= cap) break;

      // Away vertex: the active atom with the smallest gradient product.
      std::size_t away = 0;
      double away_dot = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < atoms_.size(); ++a) {
        const double v = VertexDot(grad, atoms_[a].vertex);
        if (v < away_dot) {
          away_dot = v;
          away = a;
        }
      }
      const double away_gap = x_dot - away_dot;

      Eigen::VectorXd dir;
      Eigen::VectorXd ddir;
      double step_max = 1.0;
      double slope = 0.0;
      const bool toward = gap >= away_gap;
      Eigen::VectorXd fw_image;
      if (toward) {
        fw_image = Image(fw_vertex);
        dir = Indicator(fw_vertex) - x_;
        ddir = fw_image - dx_;
        slope = gap;
      } else {
        const double lambda = atoms_[away].weight;
        dir = x_ - Indicator(atoms_[away].vertex);
        ddir = dx_ - atoms_[away].image;
        step_max = lambda / (1.0 - lambda);
        slope = away_gap;
      }
      const double curvature = dir.dot(ddir);  // <= 0 on negative-type D
      double step = step_max;
      if (curvature < 0.0) step = std::min(step_max, slope / (-2.0 * curvature));
      if (!(step > 0.0)) {
        // Zero progress is only possible from rounding noise; stop here and
        // report the measured gap.
        break;
      }

      x_ += step * dir;
      dx_ += step * ddir;
      if (toward) {
        for (auto& atom : atoms_) atom.weight *= 1.0 - step;
        if (step >= 1.0) {
          atoms_.clear();
          atoms_.push_back({fw_vertex, 1.0, fw_image});
        } else {
          AddWeight(fw_vertex, step, fw_image);
        }
      } else {
        for (auto& atom : atoms_) atom.weight *= 1.0 + step;
        atoms_[away].weight -= step;
        if (step >= step_max) atoms_.erase(atoms_.begin() + static_cast<std::ptrdiff_t>(away));
      }
      std::erase_if(atoms_, [](const Atom& a) { return a.weight <= 0.0; });
      if ((it + 1) % 64 == 0) Resynchronize();
      value = Value();
      if (opts.record_history) out.history.push_back(value);
    }

    out.iterations = it;
    out.x.assign(x_.data(), x_.data() + x_.size());
    for (double& v : out.x) v = std::clamp(v, 0.0, 1.0);
    out.value = Value();
    out.gap = gap;
    out.upper_bound = out.value + out.gap;
    return out;
  }

 private:
  struct Atom {
    Subset vertex;
    double weight;
    Eigen::VectorXd image;  // D * vertex
  };

  Eigen::VectorXd Indicator(const Subset& s) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
    for (Index e : s) v(static_cast<Eigen::Index>(e)) = 1.0;
    return v;
  }

  Eigen::VectorXd Image(const Subset& s) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
    for (Index e : s) v += d_.col(static_cast<Eigen::Index>(e));
    return v;
  }

  static double VertexDot(const Eigen::VectorXd& g, const Subset& s) {
    double total = 0.0;
    for (Index e : s) total += g(static_cast<Eigen::Index>(e));
    return total;
  }

  double Value() const { return x_.dot(dx_) + w_.dot(x_); }

  void AddWeight(const Subset& vertex, double weight, const Eigen::VectorXd& image) {
    for (auto& atom : atoms_) {
      if (atom.vertex == vertex) {
        atom.weight += weight;
        return;
      }
    }
    atoms_.push_back({vertex, weight, image});
  }

  // Rebuilds x and Dx from the convex combination to stop drift.
  void Resynchronize() {
    double total = 0.0;
    for (const auto& atom : atoms_) total += atom.weight;
    x_.setZero();
    dx_.setZero();
    for (auto& atom : atoms_) {
      atom.weight /= total;
      for (Index e : atom.vertex) x_(static_cast<Eigen::Index>(e)) += atom.weight;
      dx_ += atom.weight * atom.image;
    }
  }

  const Eigen::MatrixXd& d_;
  const MatroidSpec& m_;
  std::size_t n_;
  std::size_t alpha_;
  Eigen::VectorXd w_;
  Eigen::VectorXd x_;
  Eigen::VectorXd dx_;
  std::vector<Atom> atoms_;
};

inline void CheckScores(std::span<const double> w, std::size_t n) {
  Require(w.empty() || w.size() == n, "scores have the wrong length");
  for (double v : w) Require(v >= 0.0 && std::isfinite(v), "scores must be nonnegative");
}

}  // namespace internal

// Maximizes x^T D x + w^T x over P(M) ∩ {sum(x) = alpha}.
inline SliceSolution SolveSlice(const NegTypeDistance& d, const MatroidSpec& m,
                                std::size_t alpha, std::span<const double> w = {},
                                const SliceOptions& opts = {}) {
  const std::size_t n = m.size();
  Require(d.size() == n, "distance and matroid sizes differ");
  Require(d.forced() || d.certificate().negative_type(),
          "slice relaxation needs a negative-type distance");
  Require(alpha <= m.FullRank(), "slice index exceeds the matroid rank");
  internal::CheckScores(w, n);
  if (alpha == 0) {
    SliceSolution zero;
    zero.x.assign(n, 0.0);
    zero.converged = true;
    return zero;
  }
  // Warm start: greedy basis under the linear part c = d(base, .).
  const SchoenbergForm form = MakeSchoenbergForm(d.distance());
  std::vector<double> c(form.c.data(), form.c.data() + form.c.size());
  internal::AwayStepSolver solver(d.distance(), m, w, alpha);
  return solver.Solve(opts, c);
}

// Solves every slice 1..r(X). Slices run on up to `opts.threads` workers.
inline RelaxationResult SweepSlices(const NegTypeDistance& d, const MatroidSpec& m,
                                    std::span<const double> w = {},
                                    const SliceOptions& opts = {}) {
  const std::size_t k = m.FullRank();
  RelaxationResult result;
  result.per_slice.resize(k);
  if (k == 0) {
    result.best = SolveSlice(d, m, 0, w, opts);
    return result;
  }
  // Validate once up front so worker threads never throw.
  Require(d.size() == m.size(), "distance and matroid sizes differ");
  Require(d.forced() || d.certificate().negative_type(),
          "slice relaxation needs a negative-type distance");
  internal::CheckScores(w, m.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t a = next++; a < k; a = next++)
      result.per_slice[a] = SolveSlice(d, m, a + 1, w, opts);
  };
  const std::size_t workers = std::clamp<std::size_t>(opts.threads, 1, k);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  }

  std::size_t best = 0;
  result.opt_upper_bound = result.per_slice[0].upper_bound;
  for (std::size_t a = 1; a < k; ++a) {
    if (result.per_slice[a].value > result.per_slice[best].value) best = a;
    result.opt_upper_bound =
        std::max(result.opt_upper_bound, result.per_slice[a].upper_bound);
  }
  result.best = result.per_slice[best];
  return result;
}

}  // namespace divmax

#endif  // DIVMAX_SLICE_RELAXATION_HPP_
