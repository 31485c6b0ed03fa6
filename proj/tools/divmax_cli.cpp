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

// divmax: certify, solve, compare and generate max-sum dispersion instances.
//
// Exit codes: 0 ok, 2 invalid input, 3 certification failure, 4 internal
// invariant violation.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "divmax/baselines.hpp"
#include "divmax/common.hpp"
#include "divmax/instance.hpp"
#include "divmax/report.hpp"
#include "divmax/schoenberg.hpp"

namespace {

using divmax::Json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitUncertified = 3;
constexpr int kExitInternal = 4;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  divmax::Require(in.good(), "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteOutput(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  divmax::Require(out.good(), "cannot write '" + path + "'");
  out << text;
}

divmax::Instance LoadInstance(const std::string& path, const std::string& scores_path) {
  divmax::InstanceDoc doc = divmax::Deserialize(ReadFile(path));
  if (!scores_path.empty()) {
    const Json j = Json::parse(ReadFile(scores_path), nullptr, false);
    divmax::Require(!j.is_discarded() && j.is_array(), "scores file must hold a JSON array");
    std::vector<double> w;
    for (const Json& v : j) {
      divmax::Require(v.is_number(), "scores must be numbers");
      w.push_back(v.get<double>());
    }
    doc.scores = std::move(w);
  }
  return divmax::Materialize(doc);
}

// --threads, then DIVMAX_THREADS, then the number of cores.
std::size_t ResolveThreads(std::size_t flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("DIVMAX_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    divmax::Require(end != env && *end == '\0' && v > 0, "DIVMAX_THREADS must be a positive integer");
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

std::vector<std::pair<std::size_t, std::size_t>> ParseEdges(const std::string& text) {
  const Json j = Json::parse(text, nullptr, false);
  divmax::Require(!j.is_discarded() && j.is_array(), "edges must be a JSON array of [u, v]");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const Json& e : j) {
    divmax::Require(e.is_array() && e.size() == 2 && e[0].is_number_unsigned() &&
                        e[1].is_number_unsigned(),
                    "edges must be [u, v] pairs of vertex indices");
    edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
  }
  return edges;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-sum dispersion under matroid constraints on negative-type distances"};
  app.require_subcommand(1);

  // certify
  std::string instance_path;
  auto* certify = app.add_subcommand("certify", "Certify that the distance is of negative type");
  certify->add_option("instance", instance_path, "Instance JSON")->required();

  // solve
  double gap = 1e-6;
  std::string scores_path;
  bool trace = false;
  std::string csv_path;
  std::size_t threads = 0;
  bool force = false;
  std::string out_path;
  auto* solve = app.add_subcommand("solve", "Relax, round and report");
  solve->add_option("instance", instance_path, "Instance JSON")->required();
  solve->add_option("--gap", gap, "Relative Frank-Wolfe gap tolerance")
      ->check(CLI::PositiveNumber);
  solve->add_option("--scores", scores_path, "JSON array of nonnegative scores w");
  solve->add_flag("--trace", trace, "Include the per-step rounding trace");
  solve->add_option("--csv", csv_path, "Write the per-slice table as CSV");
  solve->add_option("--threads", threads, "Slice workers (default DIVMAX_THREADS or all cores)");
  solve->add_flag("--force", force,
                  "Run on a distance that fails certification (no guarantees hold)");
  solve->add_option("--out", out_path, "Report path (default stdout)");

  // exact
  auto* exact = app.add_subcommand("exact", "Brute-force optimum (n <= 20)");
  exact->add_option("instance", instance_path, "Instance JSON")->required();
  exact->add_option("--scores", scores_path, "JSON array of nonnegative scores w");

  // compare
  std::uint64_t seed = 0;
  double epsilon = 0.1;
  bool as_json = false;
  auto* compare = app.add_subcommand("compare", "Compare the rounding with baselines");
  compare->add_option("instance", instance_path, "Instance JSON")->required();
  compare->add_option("--gap", gap, "Relative Frank-Wolfe gap tolerance")
      ->check(CLI::PositiveNumber);
  compare->add_option("--scores", scores_path, "JSON array of nonnegative scores w");
  compare->add_option("--threads", threads, "Slice workers");
  compare->add_option("--seed", seed, "Seed for randomized rounding");
  compare->add_option("--epsilon", epsilon, "Scaling for randomized rounding")
      ->check(CLI::Range(0.0, 1.0));
  compare->add_flag("--json", as_json, "Emit JSON instead of a text table");

  // gen
  std::string generator;
  divmax::RandomPointsOptions points;
  std::size_t n = 0;
  std::size_t k = 0;
  std::string edges_json;
  double edge_probability = 0.5;
  auto* gen = app.add_subcommand("gen", "Write a generated instance");
  gen->add_option("generator", generator, "random-points | integrality-gap | dks")
      ->required()
      ->check(CLI::IsMember({"random-points", "integrality-gap", "dks"}));
  gen->add_option("--n", n, "Number of elements")->required();
  gen->add_option("--k", k, "Rank of the uniform matroid");
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--dim", points.dim, "Point dimension");
  gen->add_option("--kind", points.kind, "Distance kind");
  gen->add_option("--distribution", points.distribution, "gaussian | cube")
      ->check(CLI::IsMember({"gaussian", "cube"}));
  gen->add_option("--p", points.p, "Exponent for lp");
  gen->add_option("--universe", points.universe_size, "Universe size for set kinds");
  gen->add_option("--set-size", points.set_size, "Set size for set kinds");
  gen->add_option("--matroid", points.matroid, "uniform | partition")
      ->check(CLI::IsMember({"uniform", "partition"}));
  gen->add_option("--blocks", points.blocks, "Partition block count");
  gen->add_flag("--scores", points.with_scores, "Attach uniform [0, 1) scores");
  gen->add_option("--edges", edges_json, "dks: JSON edge list (default G(n, p))");
  gen->add_option("--edge-probability", edge_probability, "dks: p for G(n, p)");
  gen->add_option("--out", out_path, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (certify->parsed()) {
      const divmax::Instance inst = LoadInstance(instance_path, "");
      const divmax::NegTypeCertificate cert = divmax::CertifyNegativeType(inst.distance);
      std::cout << Dump(divmax::CertificateJson(cert));
      return cert.negative_type() ? kExitOk : kExitUncertified;
    }

    if (solve->parsed()) {
      const divmax::Instance inst = LoadInstance(instance_path, scores_path);
      divmax::SolveConfig config;
      config.gap_tolerance = gap;
      config.threads = ResolveThreads(threads);
      config.force = force;
      const divmax::SolveReport report = divmax::Solve(inst, config);
      if (!csv_path.empty()) WriteOutput(csv_path, divmax::SliceTableCsv(report.relaxation));
      WriteOutput(out_path, Dump(divmax::ReportJson(inst, report, trace)));
      return kExitOk;
    }

    if (exact->parsed()) {
      const divmax::Instance inst = LoadInstance(instance_path, scores_path);
      const divmax::SetValue best =
          divmax::BruteForceOpt(inst.distance, inst.matroid, inst.scores);
      std::cout << Dump(Json{{"set", best.set}, {"value", best.value}});
      return kExitOk;
    }

    if (compare->parsed()) {
      const divmax::Instance inst = LoadInstance(instance_path, scores_path);
      divmax::SolveConfig config;
      config.gap_tolerance = gap;
      config.threads = ResolveThreads(threads);
      const divmax::SolveReport report = divmax::Solve(inst, config);

      std::optional<double> randomized;
      if (inst.matroid.is_uniform()) {
        const std::size_t rank = inst.matroid.FullRank();
        std::vector<double> x_star = report.relaxation.best.x;
        if (report.relaxation.best.alpha < rank)
          x_star = divmax::LiftToBase(inst.matroid, x_star);
        const divmax::RandomizedRounding draw =
            divmax::RandomizedRoundCardinality(x_star, rank, epsilon, seed);
        randomized = divmax::SetDispersion(inst.distance, draw.set, inst.scores);
      }
      const auto rows = divmax::CompareTable(inst, report, randomized);
      const divmax::BoundChecks checks = divmax::CheckBounds(inst, report);
      if (as_json) {
        Json table = Json::array();
        for (const auto& r : rows)
          table.push_back({{"method", r.method},
                           {"value", r.value},
                           {"ratio_to_upper_bound", r.ratio_to_upper_bound}});
        std::cout << Dump(Json{{"rows", table},
                               {"guarantee_satisfied", checks.guarantee_satisfied},
                               {"loss_factor", checks.loss_factor}});
      } else {
        std::cout << std::left << std::setw(24) << "method" << std::right << std::setw(16)
                  << "value" << std::setw(12) << "ratio" << '\n';
        for (const auto& r : rows) {
          std::cout << std::left << std::setw(24) << r.method << std::right << std::fixed
                    << std::setprecision(6) << std::setw(16) << r.value << std::setw(12)
                    << r.ratio_to_upper_bound << '\n';
        }
        std::cout << "guarantee_satisfied " << (checks.guarantee_satisfied ? "true" : "false")
                  << '\n';
      }
      return kExitOk;
    }

    if (gen->parsed()) {
      divmax::InstanceDoc doc;
      if (generator == "random-points") {
        points.n = n;
        points.k = k;
        doc = divmax::GenRandomPoints(points, seed);
      } else if (generator == "integrality-gap") {
        doc = divmax::GenIntegralityGap(n, k);
      } else {
        const auto edges = edges_json.empty()
                               ? divmax::RandomGraph(n, edge_probability, seed)
                               : ParseEdges(edges_json);
        doc = divmax::GenDksReduction(n, edges, k);
        if (edges_json.empty()) doc.seed = seed;
      }
      WriteOutput(out_path, divmax::Serialize(doc));
      return kExitOk;
    }
  } catch (const divmax::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const divmax::NotNegativeType& e) {
    std::cerr << "certification failed: " << e.what() << " (use --force to override)\n";
    return kExitUncertified;
  } catch (const divmax::InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}
