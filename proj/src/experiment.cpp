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

#include "cps/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "cps/noise.hpp"
#include "cps/resources.hpp"
#include "cps/version.hpp"
#include "json.hpp"

namespace cps {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double sample_variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(xs.size() - 1);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace

std::string ExperimentConfig::canonical() const {
  std::ostringstream s;
  s << "observable=" << observable_file << '\n'
    << "gen_qubits=" << gen_qubits << '\n'
    << "gen_terms=" << gen_terms << '\n'
    << "gen_coeff_scale=" << format_double(gen_coeff_scale) << '\n'
    << "gen_seed=" << gen_seed << '\n'
    << "circuit=" << circuit_file << '\n'
    << "circuit_depth=" << circuit_depth << '\n'
    << "method=" << method << '\n'
    << "backend=" << backend << '\n'
    << "eta=" << format_double(eta) << '\n'
    << "trials=" << trials << '\n'
    << "seed=" << seed << '\n'
    << "qee_shots=" << qee_shots << '\n'
    << "noise_p1=" << format_double(noise_p1) << '\n'
    << "delta_x=" << format_double(delta_x) << '\n'
    << "delta_y=" << format_double(delta_y) << '\n';
  return s.str();
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(canonical()); }

Observable resolve_observable(const ExperimentConfig& config) {
  if (!config.observable_file.empty()) {
    if (!std::filesystem::exists(config.observable_file))
      throw UsageError("observable file not found: " + config.observable_file);
    return load_observable(config.observable_file);
  }
  return random_observable(config.gen_qubits, config.gen_terms,
                           config.gen_coeff_scale, config.gen_seed);
}

PrepCircuit random_prep_circuit(std::size_t n, int depth, std::uint64_t seed) {
  Rng rng(seed ^ 0xc1c01ULL);
  PrepCircuit circuit;
  for (int layer = 0; layer < depth; ++layer) {
    for (std::size_t q = 0; q < n; ++q)
      circuit.gates.push_back(
          Gate::ry(static_cast<int>(q), rng.uniform(-1.5, 1.5)));
    for (std::size_t q = 0; q + 1 < n; ++q)
      circuit.gates.push_back(
          Gate::cnot(static_cast<int>(q), static_cast<int>(q + 1)));
  }
  return circuit;
}

PrepCircuit resolve_circuit(const ExperimentConfig& config) {
  if (!config.circuit_file.empty()) {
    if (!std::filesystem::exists(config.circuit_file))
      throw UsageError("circuit file not found: " + config.circuit_file);
    return PrepCircuit::load(config.circuit_file);
  }
  const Observable obs = resolve_observable(config);
  return random_prep_circuit(obs.num_qubits(), config.circuit_depth,
                             config.seed);
}

int default_worker_count() {
  if (const char* env = std::getenv("CPS_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

void parallel_trials(int trials, int workers,
                     const std::function<void(int)>& fn) {
  if (workers <= 0) workers = default_worker_count();
  workers = std::min(workers, std::max(1, trials));
  if (workers == 1) {
    for (int t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (int t = w; t < trials; t += workers) fn(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

CpsOptions options_from_config(const ExperimentConfig& config,
                               const Observable& obs) {
  CpsOptions options;
  options.backend =
      config.backend == "circuit" ? CpsBackend::Circuit : CpsBackend::Spectral;
  if (config.noise_p1 > 0.0) {
    NoiseModel noise;
    noise.p1 = config.noise_p1;
    long long rounds = 1;
    try {
      rounds = static_cast<long long>(std::ceil(qsp_query_count(
                   static_cast<double>(obs.num_terms()), config.eta))) *
               static_cast<long long>(obs.num_terms());
    } catch (const std::domain_error&) {
      rounds = static_cast<long long>(obs.num_terms());
    }
    options.depolarize_p = noise.total_p(obs.num_qubits(), rounds);
  }
  options.delta_x = config.delta_x;
  options.delta_y = config.delta_y;
  return options;
}

}  // namespace

EstimateRun run_estimate(const ExperimentConfig& config) {
  if (config.trials < 1) throw UsageError("trials must be >= 1");
  if (config.method != "cps" && config.method != "qee" &&
      config.method != "both")
    throw UsageError("method must be cps, qee, or both");
  if (config.backend != "spectral" && config.backend != "circuit")
    throw UsageError("backend must be spectral or circuit");

  const Observable obs = resolve_observable(config);
  const PrepCircuit circuit = resolve_circuit(config);
  const StateVector psi0 = prepare(circuit, obs.num_qubits(), false);

  EstimateRun run;
  run.method = config.method;
  run.exact = expectation_exact(obs, psi0);

  const bool want_cps = config.method != "qee";
  const bool want_qee = config.method != "cps";
  const Rng base(config.seed);

  std::vector<CpsResult> cps_results(want_cps ? config.trials : 0);
  std::vector<QeeResult> qee_results(want_qee ? config.trials : 0);

  long long matched_budget = config.qee_shots;
  CpsOptions options = options_from_config(config, obs);
  if (want_cps || matched_budget == 0) {
    // One dry CPS accounting pass pins the matched budget for QEE.
    const LadderSchedule schedule = LadderSchedule::for_eta(
        config.eta, observable_stats(obs).weight_l1);
    int n_qsp = 1;
    try {
      n_qsp = std::max(1, static_cast<int>(std::ceil(qsp_query_count(
                              static_cast<double>(obs.num_terms()),
                              config.eta))));
    } catch (const std::domain_error&) {
    }
    const long long cps_budget =
        static_cast<long long>(obs.num_terms()) *
        (static_cast<long long>(n_qsp) * schedule.total_shots() +
         default_sign_shots(obs.num_terms(), config.eta));
    if (matched_budget == 0) matched_budget = cps_budget;
  }

  parallel_trials(config.trials, config.workers, [&](int trial) {
    Rng trial_rng = base.substream(static_cast<std::uint64_t>(trial));
    if (want_cps) {
      Rng cps_rng = trial_rng.substream(1);
      cps_results[trial] =
          cps_estimate(obs, circuit, config.eta, options, cps_rng);
    }
    if (want_qee) {
      Rng qee_rng = trial_rng.substream(2);
      qee_results[trial] = qee_estimate(obs, circuit, matched_budget,
                                        ShotAllocation::Uniform, qee_rng);
    }
  });

  std::vector<double> estimates;
  for (int t = 0; t < config.trials; ++t) {
    TrialSummary row;
    row.trial = t;
    if (want_cps) {
      row.estimate = cps_results[t].estimate;
      row.state_preparations = cps_results[t].state_preparations;
    } else {
      row.estimate = qee_results[t].estimate;
      row.state_preparations = qee_results[t].state_preparations;
    }
    estimates.push_back(row.estimate);
    run.trial_rows.push_back(row);
  }
  double mean = 0.0;
  for (double e : estimates) mean += e;
  run.mean = mean / static_cast<double>(estimates.size());
  run.variance = sample_variance(estimates);
  if (want_cps) {
    run.last_cps = cps_results.back();
    run.last_cps.variance = run.variance;
  }
  if (want_qee) run.last_qee = qee_results.back();

  if (!config.out_prefix.empty()) {
    nlohmann::json j;
    j["version"] = std::string(kVersion);
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(config.hash()));
    j["config_hash"] = hash_hex;
    j["method"] = config.method;
    j["exact"] = run.exact;
    j["mean"] = run.mean;
    j["variance"] = run.variance;
    j["trials"] = config.trials;
    if (want_cps) j["cps"] = nlohmann::json::parse(run.last_cps.to_json());
    if (want_qee) j["qee"] = nlohmann::json::parse(run.last_qee.to_json());
    run.json_path = config.out_prefix + ".json";
    write_text_file(run.json_path, j.dump(2) + "\n");

    std::ostringstream csv;
    csv << "# " << kVersion << " config_hash=" << hash_hex << '\n';
    csv << "trial,estimate,state_preparations\n";
    for (const TrialSummary& row : run.trial_rows)
      csv << row.trial << ',' << format_double(row.estimate) << ','
          << row.state_preparations << '\n';
    run.csv_path = config.out_prefix + ".csv";
    write_text_file(run.csv_path, csv.str());
  }
  return run;
}

CompareRun run_compare(const ExperimentConfig& config,
                       const std::vector<std::size_t>& sweep) {
  if (sweep.empty()) throw UsageError("compare: empty N sweep");
  if (config.trials < 2) throw UsageError("compare: needs trials >= 2");
  CompareRun run;
  const int d_l =
      std::max(0, static_cast<int>(std::floor(std::log2(1.0 / config.eta))));
  for (std::size_t num_strings : sweep) {
    const Rng base(config.seed + num_strings);
    std::vector<double> cps_sq(config.trials,
                               std::numeric_limits<double>::quiet_NaN());
    std::vector<double> qee_sq(config.trials, 0.0);
    std::vector<long long> budgets(config.trials, 0);
    parallel_trials(config.trials, config.workers, [&](int trial) {
      // Fresh instance per trial: the reported variances marginalize over
      // instances (squared error against each instance's exact value), so
      // single-instance quirks cannot skew the sweep.
      const Observable obs = random_observable(
          config.gen_qubits, num_strings, config.gen_coeff_scale,
          config.gen_seed * 1000 + num_strings * 100 +
              static_cast<std::uint64_t>(trial));
      const PrepCircuit circuit =
          config.circuit_file.empty()
              ? random_prep_circuit(config.gen_qubits, config.circuit_depth,
                                    config.gen_seed * 2000 +
                                        num_strings * 200 +
                                        static_cast<std::uint64_t>(trial))
              : PrepCircuit::load(config.circuit_file);
      const StateVector psi = prepare(circuit, obs.num_qubits(), false);
      const double exact = expectation_exact(obs, psi);

      CpsOptions options = options_from_config(config, obs);
      // Comparison design point: base scale 4x the ladder default (wrap-safe
      // via the sum|a| cap) so the top-level amplification matches the
      // shot-limited efficiency the predicted ratio assumes, and enough sign
      // shots that sign-flip noise is negligible next to the angle noise.
      const double weight_l1 = observable_stats(obs).weight_l1;
      options.eps0 = std::min(4.0 * std::numbers::pi / std::pow(2.0, d_l + 1),
                              std::numbers::pi / (2.0 * weight_l1));
      options.sign_shots = 200;

      Rng trial_rng = base.substream(static_cast<std::uint64_t>(trial));
      Rng cps_rng = trial_rng.substream(1);
      CpsResult cps;
      try {
        cps = cps_estimate(obs, circuit, config.eta, options, cps_rng);
      } catch (const LadderError&) {
        return;  // degenerate draw; the slot stays NaN and is skipped
      }
      cps_sq[trial] = (cps.estimate - exact) * (cps.estimate - exact);
      budgets[trial] = cps.state_preparations;
      Rng qee_rng = trial_rng.substream(2);
      const QeeResult qee = qee_estimate(obs, circuit, cps.state_preparations,
                                         ShotAllocation::Uniform, qee_rng);
      qee_sq[trial] = (qee.estimate - exact) * (qee.estimate - exact);
    });

    CompareRow row;
    row.num_strings = num_strings;
    int completed = 0;
    for (int t = 0; t < config.trials; ++t) {
      if (std::isnan(cps_sq[t])) continue;
      row.var_cps += cps_sq[t];
      row.var_qee += qee_sq[t];
      if (budgets[t] > row.budget) row.budget = budgets[t];
      ++completed;
    }
    if (completed == 0) throw std::runtime_error("compare: no completed trials");
    row.var_cps /= completed;
    row.var_qee /= completed;
    row.ratio = row.var_qee > 0.0 ? row.var_cps / row.var_qee : 0.0;
    row.predicted_ratio = variance_ratio(num_strings, config.eta);
    run.rows.push_back(row);
  }

  if (!config.out_prefix.empty()) {
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(config.hash()));
    std::ostringstream csv;
    csv << "# " << kVersion << " config_hash=" << hash_hex << '\n';
    csv << "N,var_cps,var_qee,ratio,predicted_ratio,budget\n";
    for (const CompareRow& row : run.rows)
      csv << row.num_strings << ',' << format_double(row.var_cps) << ','
          << format_double(row.var_qee) << ',' << format_double(row.ratio)
          << ',' << format_double(row.predicted_ratio) << ',' << row.budget
          << '\n';
    run.csv_path = config.out_prefix + "_compare.csv";
    write_text_file(run.csv_path, csv.str());
  }
  return run;
}

}  // namespace cps
