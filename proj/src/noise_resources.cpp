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

#include "cps/noise.hpp"
#include "cps/resources.hpp"

#include <cmath>
#include <stdexcept>

#include "cps/qsp.hpp"
#include "json.hpp"

namespace cps {

double NoiseModel::total_p(std::size_t n_qubits, long long rounds) const {
  const double per_round = per_round_p(n_qubits);
  if (per_round >= 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - per_round, static_cast<double>(rounds));
}

bool NoiseModel::deltas_within_robust_bound() const {
  const double bound = 1.0 / std::sqrt(8.0);
  return std::abs(delta_x) < bound && std::abs(delta_y) < bound;
}

std::pair<double, double> depolarized_distributions(double phi_a, double p) {
  if (p < 0.0 || p > 1.0)
    throw std::domain_error("depolarized_distributions: p outside [0,1]");
  const double px0 = (1.0 - p) * 0.5 * (1.0 + std::cos(2.0 * phi_a)) + p / 2.0;
  const double py0 = (1.0 - p) * 0.5 * (1.0 - std::sin(2.0 * phi_a)) + p / 2.0;
  return {px0, py0};
}

NoisyAngleBias noisy_angle_bias(double phi_a, double p, int shots_per_basis,
                                Rng& rng) {
  if (shots_per_basis < 1)
    throw std::invalid_argument("noisy_angle_bias: shots must be >= 1");
  const auto [px0, py0] = depolarized_distributions(phi_a, p);
  int x0 = 0, y0 = 0;
  for (int s = 0; s < shots_per_basis; ++s) {
    if (rng.bernoulli(px0)) ++x0;
  }
  for (int s = 0; s < shots_per_basis; ++s) {
    if (rng.bernoulli(py0)) ++y0;
  }
  const double cos_est = 2.0 * static_cast<double>(x0) / shots_per_basis - 1.0;
  const double sin_est = 1.0 - 2.0 * static_cast<double>(y0) / shots_per_basis;

  NoisyAngleBias out;
  out.phi_a_hat = 0.5 * std::atan2(sin_est, cos_est);
  const double q_hat = sin_est / cos_est;
  out.q_bias = std::abs(q_hat - std::tan(2.0 * phi_a));
  // Statistical sigma of Q via error propagation on the exact noisy
  // probabilities (Bernoulli variances over shots).
  const double m = static_cast<double>(shots_per_basis);
  const double var_px = px0 * (1.0 - px0) / m;
  const double var_py = py0 * (1.0 - py0) / m;
  const double denom = 2.0 * px0 - 1.0;
  const double dq_dpx = -2.0 * (1.0 - 2.0 * py0) / (denom * denom);
  const double dq_dpy = -2.0 / denom;
  const double sigma_q =
      std::sqrt(var_px * dq_dpx * dq_dpx + var_py * dq_dpy * dq_dpy);
  out.bound = 2.0 * p + 5.0 * sigma_q;
  out.within_bound = out.q_bias <= out.bound;
  return out;
}

namespace {

double reflection_gate_count(std::size_t n, ReflectionCostModel model) {
  const double nd = static_cast<double>(n);
  // Gates per QSP round: preparation ~n, Pauli ~n, reflection n or n^2.
  return model == ReflectionCostModel::Linear ? 3.0 * nd : nd * nd + 2.0 * nd;
}

}  // namespace

ResourceEstimate budget_cps(std::size_t num_strings, std::size_t num_qubits,
                            double eta, ReflectionCostModel cost_model) {
  if (num_strings < 2)
    throw std::domain_error("budget_cps: needs N >= 2");
  ResourceEstimate est;
  est.method = "CPS";
  est.num_strings = num_strings;
  est.num_qubits = num_qubits;
  est.eta = eta;
  try {
    est.n_qsp = qsp_query_count(static_cast<double>(num_strings), eta);
  } catch (const std::domain_error&) {
    est.n_qsp = 1.0;  // N/sqrt(eta) <= e: one query per string
  }
  est.state_preparations =
      std::round(static_cast<double>(num_strings) / eta * est.n_qsp);
  est.p1_max = std::sqrt(eta) /
               (static_cast<double>(num_strings) * est.n_qsp *
                reflection_gate_count(num_qubits, cost_model));
  est.processing_coherence_tprep = est.n_qsp;
  est.memory_coherence_tprep = static_cast<double>(num_strings) * est.n_qsp;
  return est;
}

ResourceEstimate budget_qee(std::size_t num_strings, std::size_t num_qubits,
                            double eta) {
  if (num_strings < 1 || !(eta > 0.0))
    throw std::domain_error("budget_qee: needs N >= 1 and eta > 0");
  ResourceEstimate est;
  est.method = "QEE";
  est.num_strings = num_strings;
  est.num_qubits = num_qubits;
  est.eta = eta;
  est.n_qsp = 0.0;
  est.state_preparations =
      static_cast<double>(num_strings) * static_cast<double>(num_strings) / eta;
  est.p1_max = std::sqrt(eta) / (static_cast<double>(num_strings) *
                                 static_cast<double>(num_qubits));
  est.processing_coherence_tprep = 1.0;
  est.memory_coherence_tprep = 0.0;
  return est;
}

double variance_ratio(std::size_t num_strings, double eta) {
  return qsp_query_count(static_cast<double>(num_strings), eta) /
         static_cast<double>(num_strings);
}

std::string ResourceEstimate::to_json() const {
  nlohmann::json j;
  j["method"] = method;
  j["N"] = num_strings;
  j["n"] = num_qubits;
  j["eta"] = eta;
  j["n_qsp"] = n_qsp;
  j["state_preparations"] = state_preparations;
  j["p1_max"] = p1_max;
  j["coherence_tprep"] = {{"processing", processing_coherence_tprep},
                          {"memory", memory_coherence_tprep}};
  return j.dump(2);
}

ResourceEstimate ResourceEstimate::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ResourceEstimate est;
  est.method = j.at("method").get<std::string>();
  est.num_strings = j.at("N").get<std::size_t>();
  est.num_qubits = j.at("n").get<std::size_t>();
  est.eta = j.at("eta").get<double>();
  est.n_qsp = j.at("n_qsp").get<double>();
  est.state_preparations = j.at("state_preparations").get<double>();
  est.p1_max = j.at("p1_max").get<double>();
  est.processing_coherence_tprep =
      j.at("coherence_tprep").at("processing").get<double>();
  est.memory_coherence_tprep =
      j.at("coherence_tprep").at("memory").get<double>();
  return est;
}

}  // namespace cps
