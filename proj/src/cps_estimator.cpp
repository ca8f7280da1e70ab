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

#include "cps/cps_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "json.hpp"

namespace cps {

namespace {

using Cx = std::complex<double>;
constexpr Cx kI{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

// Wrap into [-pi, pi).
double wrap_angle(double x) {
  x = std::fmod(x + kPi, 2.0 * kPi);
  if (x < 0.0) x += 2.0 * kPi;
  return x - kPi;
}

}  // namespace

int default_sign_shots(std::size_t num_terms, double eta) {
  const double arg = static_cast<double>(num_terms) / std::sqrt(eta);
  return std::max(1, static_cast<int>(std::ceil(4.0 * std::log(arg))));
}

SignEstimate estimate_signs(const Observable& obs, const PrepCircuit& v,
                            int n1, Rng& rng) {
  obs.validate();
  if (n1 < 1) throw std::invalid_argument("estimate_signs: n1 must be >= 1");
  const StateVector psi0 = prepare(v, obs.num_qubits(), false);
  SignEstimate est;
  est.shots_per_string = n1;
  const double threshold = 2.0 / std::sqrt(static_cast<double>(n1));
  for (std::size_t j = 0; j < obs.num_terms(); ++j) {
    // Parity readout of P_j is Bernoulli with p = (1 + <P_j>)/2.
    const double p_plus = parity_even_probability(psi0, obs.terms[j].string);
    int plus_count = 0;
    for (int shot = 0; shot < n1; ++shot)
      if (rng.bernoulli(p_plus)) ++plus_count;
    const double mean = 2.0 * plus_count / n1 - 1.0;
    est.rough_means.push_back(mean);
    const double signed_product = obs.terms[j].coefficient * mean;
    est.signs.push_back(signed_product >= 0.0 ? +1 : -1);
    if (std::abs(mean) < threshold) est.flagged_near_zero.push_back(j);
  }
  return est;
}

void EncodingConfig::validate(double weight_l1, std::size_t num_terms) const {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("EncodingConfig: epsilon must be > 0");
  if (!amplified_scale && epsilon * weight_l1 >= 2.0 * kPi)
    throw std::invalid_argument(
        "EncodingConfig: epsilon * sum|a_j| must stay below 2 pi");
  if (!injected.empty() && injected.size() != num_terms)
    throw std::invalid_argument(
        "EncodingConfig: injected-error list must match the term count");
}

MemoryState::MemoryState() {
  const double s = 1.0 / std::sqrt(2.0);
  plus = Cx{s, 0.0};
  minus = Cx{s, 0.0};
}

double MemoryState::p_x0() const { return 0.5 * std::norm(plus + minus); }

double MemoryState::p_y0() const {
  return 0.25 * std::norm(Cx{1.0, 1.0} * plus + Cx{1.0, -1.0} * minus);
}

MemoryState encode_round_spectral(MemoryState memory, double tau_j,
                                  double theta_j,
                                  const InjectedQspError* injected) {
  const double phase = tau_j * std::cos(theta_j);
  Cx factor_plus = std::exp(kI * phase);
  Cx factor_minus = std::exp(-kI * phase);
  if (injected != nullptr && injected->r != 0.0) {
    factor_plus += injected->r * std::exp(kI * injected->delta);
    factor_minus += injected->r * std::exp(-kI * injected->delta);
  }
  memory.plus *= factor_plus;
  memory.minus *= factor_minus;
  memory.raw_plus *= factor_plus;
  memory.raw_minus *= factor_minus;
  const double norm =
      std::sqrt(std::norm(memory.plus) + std::norm(memory.minus));
  memory.plus /= norm;
  memory.minus /= norm;
  return memory;
}

std::complex<double> aggregate_qsp_error(const MemoryState& memory,
                                         double phi_n) {
  return memory.raw_plus - std::exp(kI * phi_n);
}

double bias_corrected_phi_n(double phi_a, std::complex<double> aggregate) {
  const double r = std::abs(aggregate);
  const double theta_r = std::arg(aggregate);
  const double t = std::tan(phi_a);
  const double numer = r * std::sin(theta_r) - r * std::cos(theta_r) * t;
  const double arg = std::clamp(numer / std::sqrt(t * t + 1.0), -1.0, 1.0);
  return std::acos(arg) - std::atan(1.0 / t);
}

SpectralInstance spectral_instance(const Observable& obs,
                                   const PrepCircuit& v) {
  obs.validate();
  const StateVector psi0 = prepare(v, obs.num_qubits(), false);
  SpectralInstance inst;
  for (const PauliTerm& term : obs.terms) {
    StateVector t = psi0;
    apply_pauli_string(t, term.string, false);
    const double mean = inner_product(psi0, t).real();
    inst.means.push_back(mean);
    inst.thetas.push_back(std::acos(std::clamp(std::abs(mean), 0.0, 1.0)));
  }
  return inst;
}

MemoryState encode_observable_spectral(const Observable& obs,
                                       const SpectralInstance& instance,
                                       const std::vector<int>& signs,
                                       const EncodingConfig& config) {
  config.validate(observable_stats(obs).weight_l1, obs.num_terms());
  if (signs.size() != obs.num_terms())
    throw std::invalid_argument("encode_observable: sign list size mismatch");
  MemoryState memory;
  for (std::size_t j = 0; j < obs.num_terms(); ++j) {
    const double tau_j =
        signs[j] * config.epsilon * std::abs(obs.terms[j].coefficient);
    const InjectedQspError* injected =
        config.injected.empty() ? nullptr : &config.injected[j];
    memory = encode_round_spectral(memory, tau_j, instance.thetas[j], injected);
  }
  return memory;
}

void encode_round_circuit(StateVector& state, const QspPhasePlan& plan,
                          const PrepCircuit& v, const PauliString& p) {
  if (!state.has_memory)
    throw CircuitError("encode_round_circuit: state has no memory qubit");
  if (p.size() != state.num_processing)
    throw CircuitError("encode_round_circuit: string/state size mismatch");
  const int mem = static_cast<int>(state.memory_index());
  // Queries alternate cU and cU^dag so the e^{+-i theta/2} kickback phases
  // cancel pairwise and the register returns to the preparation subspace
  // after every term. R_phi(-theta) = R_{phi+pi}(theta), so dagger blocks
  // are dressed with phi - pi to realize the same synthesized sequence.
  for (std::size_t i = 0; i < plan.phases.size(); ++i) {
    const bool dagger = (i % 2) == 1;
    const double phi = plan.phases[i] - (dagger ? kPi : 0.0);
    apply_gate(state, Gate::rz(mem, -phi));
    apply_gate(state, Gate::h(mem));
    if (dagger)
      apply_u_pj_dagger(state, v, p, /*controlled=*/true);
    else
      apply_u_pj(state, v, p, /*controlled=*/true);
    apply_gate(state, Gate::h(mem));
    apply_gate(state, Gate::rz(mem, phi));
  }
  // Boundary rotation exp(i tau sz); see plan_response.
  apply_gate(state, Gate::rz(mem, -2.0 * plan.tau));
}

StateVector encode_observable_circuit(const Observable& obs,
                                      const PrepCircuit& v,
                                      const EncodingConfig& config) {
  config.validate(observable_stats(obs).weight_l1, obs.num_terms());
  StateVector state = prepare(v, obs.num_qubits(), /*with_memory=*/true);
  const int mem = static_cast<int>(state.memory_index());
  apply_gate(state, Gate::h(mem));
  std::map<double, QspPhasePlan> plan_cache;
  for (const PauliTerm& term : obs.terms) {
    const double tau = -config.epsilon * term.coefficient;
    auto it = plan_cache.find(tau);
    if (it == plan_cache.end()) {
      it = plan_cache
               .emplace(tau, synthesize_for_target(tau, config.plan_eps_target,
                                                   config.plan_seed))
               .first;
    }
    encode_round_circuit(state, it->second, v, term.string);
  }
  return state;
}

PhaseProbabilities memory_probabilities(const MemoryState& memory) {
  return {memory.p_x0(), memory.p_y0()};
}

PhaseProbabilities memory_probabilities(const StateVector& joint) {
  if (!joint.has_memory)
    throw CircuitError("memory_probabilities: no memory qubit");
  const int mem = static_cast<int>(joint.memory_index());
  const std::size_t mask = std::size_t{1} << mem;
  auto prob0 = [&](const StateVector& s) {
    double p = 0.0;
    for (std::size_t i = 0; i < s.amps.size(); ++i)
      if (!(i & mask)) p += std::norm(s.amps[i]);
    return p;
  };
  StateVector x_frame = joint;
  apply_gate(x_frame, Gate::h(mem));
  StateVector y_frame = joint;
  apply_gate(y_frame, Gate::sdg(mem));
  apply_gate(y_frame, Gate::h(mem));
  return {prob0(x_frame), prob0(y_frame)};
}

PhaseProbabilities apply_phase_noise(PhaseProbabilities probs, double p,
                                     double delta_x, double delta_y) {
  probs.p_x0 = (1.0 - p) * probs.p_x0 + p / 2.0 + delta_x;
  probs.p_y0 = (1.0 - p) * probs.p_y0 + p / 2.0 + delta_y;
  probs.p_x0 = std::clamp(probs.p_x0, 0.0, 1.0);
  probs.p_y0 = std::clamp(probs.p_y0, 0.0, 1.0);
  return probs;
}

SampleCounts sample_phase(const PhaseProbabilities& probs, int shots_per_basis,
                          Rng& rng) {
  if (shots_per_basis < 1)
    throw std::invalid_argument("sample_phase: shots must be >= 1");
  SampleCounts counts;
  counts.x_shots = counts.y_shots = shots_per_basis;
  for (int s = 0; s < shots_per_basis; ++s)
    if (rng.bernoulli(probs.p_x0)) ++counts.x0;
  for (int s = 0; s < shots_per_basis; ++s)
    if (rng.bernoulli(probs.p_y0)) ++counts.y0;
  return counts;
}

AngleEstimate estimate_angle(const SampleCounts& counts) {
  if (counts.x_shots < 1 || counts.y_shots < 1)
    throw std::invalid_argument("estimate_angle: counts missing a basis");
  AngleEstimate est;
  est.cos_est = 2.0 * counts.x0 / counts.x_shots - 1.0;
  est.sin_est = 1.0 - 2.0 * counts.y0 / counts.y_shots;
  if (std::abs(est.cos_est) < 1e-12 && std::abs(est.sin_est) < 1e-12)
    throw DegenerateSampleError(
        "estimate_angle: cos and sin estimates both vanish");
  est.two_phi_a = std::atan2(est.sin_est, est.cos_est);
  if (est.two_phi_a <= -kPi) est.two_phi_a = kPi;
  est.phi_a = 0.5 * est.two_phi_a;
  return est;
}

int LadderSchedule::total_shots() const {
  int total = 0;
  for (int l = 0; l <= d_l; ++l) total += shots_at(l);
  return total;
}

void LadderSchedule::validate() const {
  if (!(eps0 > 0.0))
    throw std::invalid_argument("LadderSchedule: eps0 must be > 0");
  if (d_l < 0) throw std::invalid_argument("LadderSchedule: d_l must be >= 0");
  if (alpha < 1 || gamma < 0)
    throw std::invalid_argument("LadderSchedule: need alpha >= 1, gamma >= 0");
  if (shots_at(d_l) < 1)
    throw std::invalid_argument("LadderSchedule: top level has no shots");
}

LadderSchedule LadderSchedule::for_eta(double eta, double weight_l1, int alpha,
                                       int gamma) {
  if (!(eta > 0.0)) throw std::invalid_argument("for_eta: eta must be > 0");
  LadderSchedule schedule;
  schedule.alpha = alpha;
  schedule.gamma = gamma;
  schedule.d_l =
      std::max(0, static_cast<int>(std::floor(std::log2(1.0 / eta))));
  const double cap = kPi / std::pow(2.0, schedule.d_l + 1);
  schedule.eps0 = weight_l1 > 0.0 ? std::min(cap, kPi / weight_l1) : cap;
  return schedule;
}

PhaseModel injected_phase_model(double p_sum) {
  return [p_sum](double epsilon_scale) {
    const double phi = epsilon_scale * p_sum;
    return PhaseProbabilities{0.5 * (1.0 + std::cos(2.0 * phi)),
                              0.5 * (1.0 - std::sin(2.0 * phi))};
  };
}

LadderResult ladder_estimate(const PhaseModel& model,
                             const LadderSchedule& schedule, Rng& rng) {
  schedule.validate();
  LadderResult result;
  // Running estimate of the doubled base angle 2 eps0 P_sum.
  double x_hat = 0.0;
  for (int level = 0; level <= schedule.d_l; ++level) {
    const double scale = std::pow(2.0, level) * schedule.eps0;
    const PhaseProbabilities probs = model(scale);
    const int shots = schedule.shots_at(level);
    const SampleCounts counts = sample_phase(probs, shots, rng);
    double xi_hat = 0.0;
    try {
      xi_hat = estimate_angle(counts).two_phi_a;
    } catch (const DegenerateSampleError& e) {
      throw LadderError(std::string(e.what()) + " at ladder level " +
                            std::to_string(level),
                        level);
    }
    result.per_level.push_back({level, shots, xi_hat, x_hat});
    if (level == 0) {
      x_hat = xi_hat;
    } else {
      const double pow2 = std::pow(2.0, level);
      x_hat += wrap_angle(xi_hat - pow2 * x_hat) / pow2;
    }
  }
  result.p_sum_hat = x_hat / (2.0 * schedule.eps0);
  result.final_halfwidth =
      kPi / (std::pow(2.0, schedule.d_l) * 2.0 * schedule.eps0);
  return result;
}

CpsResult cps_estimate(const Observable& obs, const PrepCircuit& v, double eta,
                       const CpsOptions& options, Rng& rng) {
  obs.validate();
  const ObservableStats stats = observable_stats(obs);
  const std::size_t num_terms = stats.num_terms;

  const int n1 = options.sign_shots.value_or(default_sign_shots(num_terms, eta));
  Rng sign_rng = rng.substream(0x51673);
  SignEstimate signs = estimate_signs(obs, v, n1, sign_rng);
  if (options.forced_signs) {
    if (options.forced_signs->size() != num_terms)
      throw std::invalid_argument("cps_estimate: forced sign list mismatch");
    signs.signs = *options.forced_signs;
  }

  LadderSchedule schedule =
      LadderSchedule::for_eta(eta, stats.weight_l1, options.alpha, options.gamma);
  if (options.d_l) schedule.d_l = *options.d_l;
  if (options.eps0) schedule.eps0 = *options.eps0;
  schedule.validate();

  EncodingConfig base_config;
  base_config.backend = options.backend;
  base_config.injected = options.injected;
  base_config.plan_eps_target = options.plan_eps_target > 0.0
                                    ? options.plan_eps_target
                                    : std::sqrt(eta) / num_terms;
  base_config.plan_seed = options.plan_seed;

  // The base scale must keep xi_0 below 2 pi; levels above it wrap by design.
  if (schedule.eps0 * stats.weight_l1 >= 2.0 * kPi)
    throw std::invalid_argument(
        "cps_estimate: eps0 * sum|a_j| must stay below 2 pi");

  PhaseModel model;
  if (options.backend == CpsBackend::Spectral) {
    const SpectralInstance instance = spectral_instance(obs, v);
    model = [obs, instance, sign_values = signs.signs, base_config,
             eps0 = schedule.eps0](double scale) {
      EncodingConfig config = base_config;
      config.epsilon = scale;
      config.amplified_scale = scale > eps0;
      const MemoryState memory =
          encode_observable_spectral(obs, instance, sign_values, config);
      return memory_probabilities(memory);
    };
  } else {
    model = [obs, v, base_config, eps0 = schedule.eps0](double scale) {
      EncodingConfig config = base_config;
      config.epsilon = scale;
      config.amplified_scale = scale > eps0;
      const StateVector joint = encode_observable_circuit(obs, v, config);
      return memory_probabilities(joint);
    };
  }
  if (options.depolarize_p != 0.0 || options.delta_x != 0.0 ||
      options.delta_y != 0.0) {
    PhaseModel clean = std::move(model);
    model = [clean, p = options.depolarize_p, dx = options.delta_x,
             dy = options.delta_y](double scale) {
      return apply_phase_noise(clean(scale), p, dx, dy);
    };
  }

  Rng ladder_rng = rng.substream(0x1adde6);
  const LadderResult ladder = ladder_estimate(model, schedule, ladder_rng);

  CpsResult result;
  result.estimate = ladder.p_sum_hat;
  result.variance = std::numeric_limits<double>::quiet_NaN();
  result.sign_shots = n1;
  result.eps0 = schedule.eps0;
  result.d_l = schedule.d_l;
  result.alpha = schedule.alpha;
  result.gamma = schedule.gamma;
  result.m_q = schedule.total_shots();
  result.final_halfwidth = ladder.final_halfwidth;
  result.signs = signs.signs;
  result.flagged_terms = signs.flagged_near_zero;
  result.per_level = ladder.per_level;

  int n_qsp = 1;
  if (options.n_qsp_accounting) {
    n_qsp = *options.n_qsp_accounting;
  } else {
    try {
      n_qsp = std::max(
          1, static_cast<int>(std::ceil(qsp_query_count(
                 static_cast<double>(num_terms), eta))));
    } catch (const std::domain_error&) {
      n_qsp = 1;  // degenerate N/sqrt(eta) <= e corner
    }
  }
  result.n_qsp_used = n_qsp;
  result.state_preparations =
      static_cast<long long>(num_terms) *
      (static_cast<long long>(n_qsp) * result.m_q + n1);

  const double sign_threshold = 2.0 / std::sqrt(static_cast<double>(n1));
  for (std::size_t j : signs.flagged_near_zero) {
    const double level = std::max(std::abs(signs.rough_means[j]), sign_threshold);
    result.flagged_bias_bound +=
        2.0 * std::abs(obs.terms[j].coefficient) * level;
  }
  return result;
}

std::string CpsResult::to_json() const {
  nlohmann::json j;
  j["estimate"] = estimate;
  j["variance"] = variance;
  j["T"] = state_preparations;
  j["n_qsp"] = n_qsp_used;
  j["n1"] = sign_shots;
  j["eps0"] = eps0;
  j["d_L"] = d_l;
  j["alpha"] = alpha;
  j["gamma"] = gamma;
  j["M_q"] = m_q;
  j["final_halfwidth"] = final_halfwidth;
  j["flagged_bias_bound"] = flagged_bias_bound;
  j["signs"] = signs;
  j["flagged_terms"] = flagged_terms;
  j["per_level"] = nlohmann::json::array();
  for (const LevelDiagnostics& level : per_level) {
    j["per_level"].push_back({{"l", level.level},
                              {"M_l", level.shots_per_basis},
                              {"xi_hat", level.xi_hat},
                              {"window_center", level.window_center}});
  }
  return j.dump(2);
}

}  // namespace cps
