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

#include <string>

namespace cps {

// Gate-count model for the controlled reflection: linear (native multi-qubit
// platforms) or quadratic (conventional decomposition).
enum class ReflectionCostModel { Linear, Quadratic };

struct ResourceEstimate {
  std::string method;  // "CPS" or "QEE"
  std::size_t num_strings = 0;
  std::size_t num_qubits = 0;
  double eta = 1.0;
  double n_qsp = 0.0;            // per-string query count (CPS only)
  double state_preparations = 0.0;
  double p1_max = 0.0;           // largest tolerable single-gate error
  // Coherence-time requirements in units of t_prep.
  double processing_coherence_tprep = 1.0;
  double memory_coherence_tprep = 0.0;

  std::string to_json() const;
  static ResourceEstimate from_json(const std::string& text);
};

// T = (N/eta) ln(N/sqrt(eta)) / lnln(N/sqrt(eta)), p1 budget from
// sqrt(eta) >= N n_qsp * (gates per round) * p1.
ResourceEstimate budget_cps(std::size_t num_strings, std::size_t num_qubits,
                            double eta,
                            ReflectionCostModel cost_model =
                                ReflectionCostModel::Linear);

// T = N^2/eta, p1 budget from sqrt(eta) >= N n p1.
ResourceEstimate budget_qee(std::size_t num_strings, std::size_t num_qubits,
                            double eta);

// Predicted sigma^2_CPS / sigma^2_QEE = n_qsp(N, eta) / N.
double variance_ratio(std::size_t num_strings, double eta);

}  // namespace cps
