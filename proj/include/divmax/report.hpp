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

// End-to-end pipeline (certify, relax, round, baselines) and its reports.
// Every bound check in a report is recomputed from the raw vectors when the
// report is serialized, never copied from solver bookkeeping.

#ifndef DIVMAX_REPORT_HPP_
#define DIVMAX_REPORT_HPP_

#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "divmax/baselines.hpp"
#include "divmax/chain_rounding.hpp"
#include "divmax/common.hpp"
#include "divmax/distance.hpp"
#include "divmax/instance.hpp"
#include "divmax/matroid.hpp"
#include "divmax/schoenberg.hpp"
#include "divmax/slice_relaxation.hpp"

namespace divmax {

// Brute force runs automatically inside solve/compare up to this size.
inline constexpr std::size_t kAutoExactSize = 16;

struct SolveConfig {
  double gap_tolerance = 1e-6;
  std::size_t threads = 1;
  bool force = false;  // run on an uncertified distance, voiding guarantees
  bool baselines = true;
  bool exact = true;  // brute force when n <= kAutoExactSize
};

struct PhaseTimes {
  double certify = 0.0;
  double relax = 0.0;
  double round = 0.0;
  double baselines = 0.0;
};

struct SolveReport {
  NegTypeCertificate certificate;
  bool forced = false;
  RelaxationResult relaxation;
  RoundingResult rounding;
  std::optional<SetValue> local_search;
  std::optional<SetValue> greedy;
  std::optional<SetValue> exact;
  PhaseTimes seconds;
};

namespace internal {

class Stopwatch {
 public:
  double Lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace internal

// Throws NotNegativeType when the distance fails certification and
// `config.force` is off.
inline SolveReport Solve(const Instance& inst, const SolveConfig& config = {}) {
  SolveReport report;
  internal::Stopwatch clock;
  const NegTypeDistance d = config.force ? NegTypeDistance::Force(inst.distance)
                                         : NegTypeDistance::Certify(inst.distance);
  report.certificate = d.certificate();
  report.forced = config.force;
  report.seconds.certify = clock.Lap();

  SliceOptions opts;
  opts.gap_tolerance = config.gap_tolerance;
  opts.threads = config.threads;
  report.relaxation = SweepSlices(d, inst.matroid, inst.scores, opts);
  report.seconds.relax = clock.Lap();

  // The rounding walks the base polytope, so the slice optimum is lifted to
  // a point of mass r(X) first (identity on the top slice).
  std::vector<double> x_star = report.relaxation.best.x;
  if (report.relaxation.best.alpha < inst.matroid.FullRank())
    x_star = LiftToBase(inst.matroid, x_star);
  report.rounding = Round(inst.distance, inst.matroid, x_star, inst.scores);
  report.seconds.round = clock.Lap();

  if (config.baselines) {
    report.greedy = GreedyInsertion(inst.distance, inst.matroid, inst.scores);
    report.local_search =
        LocalSearchHalf(inst.distance, inst.matroid, report.rounding.basis, inst.scores);
    if (config.exact && inst.matroid.size() <= kAutoExactSize)
      report.exact = BruteForceOpt(inst.distance, inst.matroid, inst.scores);
  }
  report.seconds.baselines = clock.Lap();
  return report;
}

inline Json CertificateJson(const NegTypeCertificate& cert) {
  Json out;
  out["verdict"] = cert.negative_type() ? "NegativeType" : "NotNegativeType";
  out["min_eigenvalue"] = cert.min_eigenvalue;
  out["tolerance"] = cert.tolerance;
  if (cert.witness) {
    out["witness"] = *cert.witness;
    out["witness_value"] = cert.witness_value;
  }
  return out;
}

struct BoundChecks {
  double relaxed_value = 0.0;  // g(x*) recomputed
  double basis_value = 0.0;    // g(basis) recomputed
  double loss_factor = 0.0;
  double guaranteed_value = 0.0;
  bool independent = false;
  bool is_basis = false;
  bool guarantee_satisfied = false;
  bool step_bounds_satisfied = false;
  bool upper_bound_respected = true;  // vs exact optimum when known
};

inline BoundChecks CheckBounds(const Instance& inst, const SolveReport& r) {
  BoundChecks b;
  const auto& basis = r.rounding.basis;
  const std::size_t k = inst.matroid.FullRank();
  std::vector<double> x_star = r.relaxation.best.x;
  if (r.relaxation.best.alpha < k) x_star = LiftToBase(inst.matroid, x_star);
  b.relaxed_value = Dispersion(inst.distance, x_star, inst.scores);
  b.basis_value = SetDispersion(inst.distance, basis, inst.scores);
  b.loss_factor = RoundingLossFactor(k);
  // The rounding loss is budgeted against the quadratic term alone, so
  // scores only tighten the guarantee.
  const double quad = Dispersion(inst.distance, x_star);
  b.guaranteed_value = b.relaxed_value - b.loss_factor * quad;
  b.independent = inst.matroid.IsIndependent(basis);
  b.is_basis = b.independent && basis.size() == k;
  b.guarantee_satisfied =
      b.basis_value >= b.guaranteed_value - tol::kNumeric * (1.0 + std::abs(b.relaxed_value));

  const auto& steps = r.rounding.trace.steps;
  b.step_bounds_satisfied = true;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const double budget = ReverseIndexBound(steps.size() - t, k, quad);
    if (steps[t].loss > budget + 1e-9) b.step_bounds_satisfied = false;
  }
  if (r.exact) {
    b.upper_bound_respected = r.relaxation.opt_upper_bound >=
                              r.exact->value - 1e-6 * (1.0 + r.exact->value);
  }
  return b;
}

inline double Ratio(double num, double den) {
  return den == 0.0 ? (num == 0.0 ? 1.0 : 0.0) : num / den;
}

inline Json ReportJson(const Instance& inst, const SolveReport& r, bool include_trace) {
  const BoundChecks b = CheckBounds(inst, r);
  Json out;
  out["certificate"] = CertificateJson(r.certificate);
  out["forced"] = r.forced;

  Json slices = Json::array();
  for (const SliceSolution& s : r.relaxation.per_slice) {
    slices.push_back({{"alpha", s.alpha},
                      {"value", s.value},
                      {"gap", s.gap},
                      {"upper_bound", s.upper_bound},
                      {"iterations", s.iterations},
                      {"converged", s.converged}});
  }
  out["slices"] = std::move(slices);
  out["relaxation"] = {{"alpha", r.relaxation.best.alpha},
                       {"x", r.relaxation.best.x},
                       {"value", b.relaxed_value},
                       {"opt_upper_bound", r.relaxation.opt_upper_bound}};

  Json rounding = {{"steps", r.rounding.trace.steps.size()},
                   {"total_loss", r.rounding.trace.total_loss},
                   {"start_value", r.rounding.trace.start_value}};
  if (include_trace) {
    Json steps = Json::array();
    const auto& trace = r.rounding.trace;
    for (std::size_t t = 0; t < trace.steps.size(); ++t) {
      const StepRecord& s = trace.steps[t];
      Json step = {{"up", s.up},
                   {"down", s.down},
                   {"epsilon", s.epsilon},
                   {"event", s.event == StepEvent::kErased ? "erased" : "refined"},
                   {"value_after", s.value_after},
                   {"loss", s.loss},
                   {"loss_budget", trace.reverse_index_bounds[t]},
                   {"progress", s.progress_after}};
      if (s.new_tight_set) step["tight_set"] = *s.new_tight_set;
      steps.push_back(std::move(step));
    }
    rounding["trace"] = std::move(steps);
  }
  out["rounding"] = std::move(rounding);
  out["basis"] = r.rounding.basis;
  out["basis_value"] = b.basis_value;

  Json baselines = Json::object();
  if (r.local_search)
    baselines["local_search"] = {{"set", r.local_search->set}, {"value", r.local_search->value}};
  if (r.greedy)
    baselines["greedy_insertion"] = {{"set", r.greedy->set}, {"value", r.greedy->value}};
  if (r.exact) baselines["exact"] = {{"set", r.exact->set}, {"value", r.exact->value}};
  out["baselines"] = std::move(baselines);

  out["checks"] = {{"independent", b.independent},
                   {"is_basis", b.is_basis},
                   {"loss_factor", b.loss_factor},
                   {"guaranteed_value", b.guaranteed_value},
                   {"guarantee_satisfied", b.guarantee_satisfied},
                   {"step_bounds_satisfied", b.step_bounds_satisfied},
                   {"upper_bound_respected", b.upper_bound_respected}};
  out["seconds"] = {{"certify", r.seconds.certify},
                    {"relax", r.seconds.relax},
                    {"round", r.seconds.round},
                    {"baselines", r.seconds.baselines}};
  return out;
}

inline std::string SliceTableCsv(const RelaxationResult& relaxation) {
  std::ostringstream out;
  out.precision(12);
  out << "alpha,value,gap,upper_bound,iterations,converged\n";
  for (const SliceSolution& s : relaxation.per_slice) {
    out << s.alpha << ',' << s.value << ',' << s.gap << ',' << s.upper_bound << ','
        << s.iterations << ',' << (s.converged ? 1 : 0) << '\n';
  }
  return out.str();
}

struct CompareRow {
  std::string method;
  double value = 0.0;
  double ratio_to_upper_bound = 0.0;
};

// Relaxation bound, rounded basis, local search, greedy insertion, exact optimum (when
// computed) and, for uniform matroids, one randomized rounding draw.
inline std::vector<CompareRow> CompareTable(const Instance& inst, const SolveReport& r,
                                            std::optional<double> randomized) {
  const BoundChecks b = CheckBounds(inst, r);
  const double ub = r.relaxation.opt_upper_bound;
  std::vector<CompareRow> rows;
  auto add = [&](std::string name, double v) {
    rows.push_back({std::move(name), v, Ratio(v, ub)});
  };
  add("relaxation_upper_bound", ub);
  add("chain_rounding", b.basis_value);
  if (r.local_search) add("local_search", r.local_search->value);
  if (r.greedy) add("greedy_insertion", r.greedy->value);
  if (r.exact) add("exact", r.exact->value);
  if (randomized) add("randomized_rounding", *randomized);
  return rows;
}

}  // namespace divmax

#endif  // DIVMAX_REPORT_HPP_
