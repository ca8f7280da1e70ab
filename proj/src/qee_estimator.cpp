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

#include "cps/qee_estimator.hpp"

#include <cmath>

#include "json.hpp"

namespace cps {

namespace {

std::vector<long long> allocate_shots(const Observable& obs,
                                      long long total_shots,
                                      ShotAllocation allocation) {
  const std::size_t n_terms = obs.num_terms();
  std::vector<long long> shots(n_terms, 0);
  if (allocation == ShotAllocation::Uniform) {
    const long long per_term = total_shots / static_cast<long long>(n_terms);
    for (auto& s : shots) s = per_term;
  } else {
    const double weight_l1 = observable_stats(obs).weight_l1;
    for (std::size_t j = 0; j < n_terms; ++j) {
      shots[j] = static_cast<long long>(
          std::floor(total_shots * std::abs(obs.terms[j].coefficient) /
                     weight_l1));
    }
  }
  for (std::size_t j = 0; j < n_terms; ++j) {
    if (shots[j] < 1)
      throw AllocationError("allocation gives zero shots to term " +
                            std::to_string(j));
  }
  return shots;
}

}  // namespace

QeeResult qee_estimate(const Observable& obs, const PrepCircuit& v,
                       long long total_shots, ShotAllocation allocation,
                       Rng& rng) {
  obs.validate();
  if (total_shots < static_cast<long long>(obs.num_terms()))
    throw AllocationError("total shots below the term count");
  const std::vector<long long> shots =
      allocate_shots(obs, total_shots, allocation);

  const StateVector psi0 = prepare(v, obs.num_qubits(), false);
  QeeResult result;
  for (std::size_t j = 0; j < obs.num_terms(); ++j) {
    // Basis rotations + parity readout make each shot a Bernoulli draw with
    // p = (1 + <P_j>)/2.
    const double p_plus = parity_even_probability(psi0, obs.terms[j].string);
    long long plus = 0;
    for (long long s = 0; s < shots[j]; ++s)
      if (rng.bernoulli(p_plus)) ++plus;
    const double mean = 2.0 * static_cast<double>(plus) / shots[j] - 1.0;
    result.per_term_means.push_back(mean);
    result.per_term_shots.push_back(shots[j]);
    result.estimate += obs.terms[j].coefficient * mean;
    result.state_preparations += shots[j];
    // Bernoulli variance per term; under uniform allocation this sums to the
    // N/M_c prefactor form.
    result.variance_analytic += obs.terms[j].coefficient *
                                obs.terms[j].coefficient * (1.0 - mean * mean) /
                                static_cast<double>(shots[j]);
  }
  return result;
}

std::string QeeResult::to_json() const {
  nlohmann::json j;
  j["estimate"] = estimate;
  j["variance_analytic"] = variance_analytic;
  j["T"] = state_preparations;
  j["per_term_means"] = per_term_means;
  j["per_term_shots"] = per_term_shots;
  return j.dump(2);
}

}  // namespace cps
