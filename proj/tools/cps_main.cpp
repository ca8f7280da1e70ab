// Copyright 2026 The cps-sim Authors
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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cps/experiment.hpp"
#include "cps/noise.hpp"
#include "cps/qsp.hpp"
#include "cps/resources.hpp"
#include "cps/version.hpp"
#include "json.hpp"

namespace {

// Every output file carries the version and a fingerprint of the arguments
// that produced it.
void write_json_with_provenance(const std::string& path,
                                const std::string& body,
                                const std::string& args_fingerprint) {
  nlohmann::json j = nlohmann::json::parse(body);
  j["version"] = std::string(cps::kVersion);
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(cps::fnv1a(args_fingerprint)));
  j["config_hash"] = hash_hex;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

void add_common(CLI::App* cmd, cps::ExperimentConfig& config) {
  cmd->add_option("--observable", config.observable_file,
                  "observable text file (coefficient + axis letters per line)");
  cmd->add_option("--gen-qubits", config.gen_qubits,
                  "generator: qubit count (used when no observable file)");
  cmd->add_option("--gen-terms", config.gen_terms, "generator: term count");
  cmd->add_option("--gen-scale", config.gen_coeff_scale,
                  "generator: coefficient scale");
  cmd->add_option("--gen-seed", config.gen_seed, "generator: seed");
  cmd->add_option("--circuit", config.circuit_file,
                  "preparation circuit file (one gate per line)");
  cmd->add_option("--circuit-depth", config.circuit_depth,
                  "generated circuit depth (when no circuit file)");
  cmd->add_option("--eta", config.eta, "target variance");
  cmd->add_option("--trials", config.trials, "Monte Carlo trials");
  cmd->add_option("--seed", config.seed, "experiment seed");
  cmd->add_option("--workers", config.workers,
                  "worker threads (0 = CPS_WORKERS env or 1)");
  cmd->add_option("--noise.p1", config.noise_p1,
                  "single-gate error probability");
  cmd->add_option("--noise.delta-x", config.delta_x,
                  "additive tomography offset on P(X=0)");
  cmd->add_option("--noise.delta-y", config.delta_y,
                  "additive tomography offset on P(Y=0)");
  cmd->add_option("--out", config.out_prefix, "output file prefix");
}

int run_cli(int argc, char** argv) {
  CLI::App app{"coherent Pauli summation simulator"};
  app.set_version_flag("--version", std::string(cps::kVersion));
  app.set_config("--config", "", "key = value config file; flags override");
  app.fallthrough();
  app.require_subcommand(1);

  cps::ExperimentConfig config;

  auto* estimate = app.add_subcommand(
      "estimate", "run the CPS and/or QEE estimator on one observable");
  add_common(estimate, config);
  estimate->add_option("--method", config.method, "cps | qee | both");
  estimate->add_option("--backend", config.backend, "spectral | circuit");
  estimate->add_option("--qee-shots", config.qee_shots,
                       "QEE budget (0 = matched to CPS)");

  auto* compare = app.add_subcommand(
      "compare", "variance-ratio sweep over term counts at matched budget");
  add_common(compare, config);
  std::vector<std::size_t> sweep;
  compare->add_option("--sweep", sweep, "term counts to sweep")
      ->expected(-1);

  auto* budget = app.add_subcommand(
      "budget", "analytic state-preparation and gate-error budgets");
  std::size_t budget_n_strings = 59;
  std::size_t budget_n_qubits = 4;
  double budget_eta = 1.0;
  std::string budget_method = "cps";
  std::string budget_cost = "linear";
  std::string budget_out;
  budget->add_option("--n-strings,-N", budget_n_strings, "term count N");
  budget->add_option("--n-qubits,-n", budget_n_qubits, "qubit count n");
  budget->add_option("--eta", budget_eta, "target variance");
  budget->add_option("--method", budget_method, "cps | qee");
  budget->add_option("--cost-model", budget_cost,
                     "controlled-reflection cost: linear | quadratic");
  budget->add_option("--out", budget_out, "write budget JSON here");

  auto* synth = app.add_subcommand(
      "synth", "synthesize a certified phase plan for exp(i tau cos theta)");
  double synth_tau = 0.0;
  double synth_eps = 0.0;
  std::string synth_out;
  synth->add_option("--tau", synth_tau, "target tau")->required();
  synth->add_option("--eps", synth_eps, "certified error target")->required();
  synth->add_option("--out", synth_out, "write plan JSON here");

  auto* gen = app.add_subcommand("gen-observable",
                                 "write a random observable file");
  std::size_t gen_n = 3, gen_terms = 5;
  double gen_scale = 0.5;
  std::uint64_t gen_seed = 7;
  std::string gen_out = "observable.txt";
  gen->add_option("--qubits", gen_n, "qubit count");
  gen->add_option("--terms", gen_terms, "term count");
  gen->add_option("--scale", gen_scale, "coefficient scale");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--out", gen_out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (estimate->parsed()) {
    const cps::EstimateRun run = cps::run_estimate(config);
    std::printf("exact      %.12g\n", run.exact);
    std::printf("mean       %.12g\n", run.mean);
    std::printf("variance   %.12g\n", run.variance);
    if (!run.json_path.empty())
      std::printf("wrote %s and %s\n", run.json_path.c_str(),
                  run.csv_path.c_str());
    return 0;
  }
  if (compare->parsed()) {
    const cps::CompareRun run = cps::run_compare(config, sweep);
    std::printf("N,var_cps,var_qee,ratio,predicted_ratio,budget\n");
    for (const cps::CompareRow& row : run.rows)
      std::printf("%zu,%.6g,%.6g,%.6g,%.6g,%lld\n", row.num_strings,
                  row.var_cps, row.var_qee, row.ratio, row.predicted_ratio,
                  row.budget);
    if (!run.csv_path.empty())
      std::printf("wrote %s\n", run.csv_path.c_str());
    return 0;
  }
  if (budget->parsed()) {
    cps::ResourceEstimate est;
    if (budget_method == "cps") {
      const auto model = budget_cost == "quadratic"
                             ? cps::ReflectionCostModel::Quadratic
                             : cps::ReflectionCostModel::Linear;
      if (budget_cost != "linear" && budget_cost != "quadratic")
        throw cps::UsageError("cost-model must be linear or quadratic");
      est = cps::budget_cps(budget_n_strings, budget_n_qubits, budget_eta,
                            model);
    } else if (budget_method == "qee") {
      est = cps::budget_qee(budget_n_strings, budget_n_qubits, budget_eta);
    } else {
      throw cps::UsageError("budget method must be cps or qee");
    }
    std::printf("method                %s\n", est.method.c_str());
    std::printf("N strings             %zu\n", est.num_strings);
    std::printf("n qubits              %zu\n", est.num_qubits);
    std::printf("eta                   %g\n", est.eta);
    if (est.method == "CPS") std::printf("n_qsp                 %.4g\n", est.n_qsp);
    std::printf("state preparations    %.6g\n", est.state_preparations);
    std::printf("p1 max                %.4g\n", est.p1_max);
    std::printf("processing coherence  %.4g t_prep\n",
                est.processing_coherence_tprep);
    if (est.method == "CPS")
      std::printf("memory coherence      %.4g t_prep\n",
                  est.memory_coherence_tprep);
    if (!budget_out.empty()) {
      write_json_with_provenance(
          budget_out, est.to_json(),
          "budget " + std::to_string(budget_n_strings) + " " +
              std::to_string(budget_n_qubits) + " " +
              std::to_string(budget_eta) + " " + budget_method + " " +
              budget_cost);
      std::printf("wrote %s\n", budget_out.c_str());
    }
    return 0;
  }
  if (synth->parsed()) {
    if (!(synth_eps > 0.0)) throw cps::UsageError("synth: eps must be > 0");
    const cps::QspPhasePlan plan =
        cps::synthesize_for_target(synth_tau, synth_eps);
    const std::string json = plan.to_json();
    if (synth_out.empty()) {
      std::printf("%s\n", json.c_str());
    } else {
      write_json_with_provenance(synth_out, json,
                                 "synth " + std::to_string(synth_tau) + " " +
                                     std::to_string(synth_eps));
      std::printf("wrote %s (n_qsp=%d, eps_certified=%.3e)\n",
                  synth_out.c_str(), plan.n_qsp, plan.eps_certified);
    }
    return 0;
  }
  if (gen->parsed()) {
    const cps::Observable obs =
        cps::random_observable(gen_n, gen_terms, gen_scale, gen_seed);
    std::ofstream out(gen_out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + gen_out);
    out << cps::serialize_observable(obs);
    std::printf("wrote %s\n", gen_out.c_str());
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const cps::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
