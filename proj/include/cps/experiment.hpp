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

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cps/cps_estimator.hpp"
#include "cps/qee_estimator.hpp"
#include "cps/statevector.hpp"

namespace cps {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A config plus its seed determines every output bit, at any worker count.
struct ExperimentConfig {
  std::string observable_file;  // empty -> generator parameters below
  std::size_t gen_qubits = 3;
  std::size_t gen_terms = 5;
  double gen_coeff_scale = 0.5;
  std::uint64_t gen_seed = 7;

  std::string circuit_file;  // empty -> generated pseudo-random circuit
  int circuit_depth = 2;

  std::string method = "cps";  // cps | qee | both
  std::string backend = "spectral";
  double eta = 0.01;
  int trials = 1;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 -> CPS_WORKERS env var, else 1

  long long qee_shots = 0;  // 0 -> matched to the CPS preparation count
  double noise_p1 = 0.0;
  double delta_x = 0.0;
  double delta_y = 0.0;

  std::string out_prefix;  // empty -> no files written

  std::string canonical() const;
  std::uint64_t hash() const;
};

Observable resolve_observable(const ExperimentConfig& config);
PrepCircuit resolve_circuit(const ExperimentConfig& config);

// Layers of RY rotations and a CNOT chain; deterministic in the seed.
PrepCircuit random_prep_circuit(std::size_t n, int depth, std::uint64_t seed);

// Runs fn(trial) for every trial index, distributing across `workers`
// threads; results are committed in trial order regardless of scheduling.
void parallel_trials(int trials, int workers,
                     const std::function<void(int)>& fn);

int default_worker_count();

struct TrialSummary {
  int trial = 0;
  double estimate = 0.0;
  long long state_preparations = 0;
};

struct EstimateRun {
  std::string method;
  double mean = 0.0;
  double variance = 0.0;  // sample variance across trials
  double exact = 0.0;
  std::vector<TrialSummary> trial_rows;
  CpsResult last_cps;      // diagnostics of the final trial (cps methods)
  QeeResult last_qee;
  std::string json_path;
  std::string csv_path;
};

EstimateRun run_estimate(const ExperimentConfig& config);

struct CompareRow {
  std::size_t num_strings = 0;
  double var_cps = 0.0;
  double var_qee = 0.0;
  double ratio = 0.0;
  double predicted_ratio = 0.0;
  long long budget = 0;
};

struct CompareRun {
  std::vector<CompareRow> rows;
  std::string csv_path;
};

CompareRun run_compare(const ExperimentConfig& config,
                       const std::vector<std::size_t>& sweep);

}  // namespace cps
