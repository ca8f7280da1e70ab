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

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cps/pauli.hpp"
#include "cps/qsp.hpp"
#include "cps/rng.hpp"
#include "cps/statevector.hpp"

namespace cps {

// ---------------------------------------------------------------------------
// Step 1: sign pre-estimation
// ---------------------------------------------------------------------------

struct SignEstimate {
  std::vector<int> signs;  // s_j in {+1, -1}, sign of a_j <P_j>
  int shots_per_string = 0;
  std::vector<std::size_t> flagged_near_zero;  // |mean| below 2/sqrt(n1)
  std::vector<double> rough_means;             // empirical <P_j>
};

// n1 projective measurements of each P_j on fresh preparations. An exactly
// zero empirical mean gives s_j = +1 and a flag.
SignEstimate estimate_signs(const Observable& obs, const PrepCircuit& v,
                            int n1, Rng& rng);

int default_sign_shots(std::size_t num_terms, double eta);

// ---------------------------------------------------------------------------
// Step 2: phase encoding
// ---------------------------------------------------------------------------

enum class CpsBackend { Spectral, Circuit };

struct InjectedQspError {
  double r = 0.0;      // magnitude of the per-round QSP error term
  double delta = 0.0;  // its phase
};

struct EncodingConfig {
  double epsilon = 0.1;
  CpsBackend backend = CpsBackend::Spectral;
  std::vector<InjectedQspError> injected;  // empty, or one entry per term
  double plan_eps_target = 1e-4;           // circuit-backend plan quality
  std::uint64_t plan_seed = 0x9d2c5680u;
  // Set for ladder levels l >= 1: the 2 pi wrap bound applies to the base
  // scale only, amplified levels wrap on purpose.
  bool amplified_scale = false;

  void validate(double weight_l1, std::size_t num_terms) const;
};

// Memory qubit amplitudes on the |+>/|-> pair; the protocol starts from the
// balanced state (memory |0>).
struct MemoryState {
  std::complex<double> plus;
  std::complex<double> minus;
  // Unnormalized branch factors accumulated over rounds, for error-model
  // diagnostics ((1+eps)^N growth and the aggregate R e^{i Theta_R}).
  std::complex<double> raw_plus{1.0, 0.0};
  std::complex<double> raw_minus{1.0, 0.0};

  MemoryState();

  double p_x0() const;
  double p_y0() const;
};

// One round: |+> and |-> amplitudes pick up (e^{+-i tau cos theta} + r e^{+-i delta}),
// then the pair is renormalized.
MemoryState encode_round_spectral(MemoryState memory, double tau_j,
                                  double theta_j,
                                  const InjectedQspError* injected = nullptr);

// Aggregate injected-error term R e^{i Theta_R}: the |+> branch's raw
// product minus the ideal phase factor e^{i phi_n}. Bounded in magnitude by
// (1 + eps)^N - 1.
std::complex<double> aggregate_qsp_error(const MemoryState& memory,
                                         double phi_n);

// Diagnostic reconstruction of the ideal phase from a measured phi_a and
// the aggregate error; reduces to phi_a when the error vanishes.
double bias_corrected_phi_n(double phi_a, std::complex<double> aggregate);

struct SpectralInstance {
  std::vector<double> means;   // exact <P_j>
  std::vector<double> thetas;  // arccos |<P_j>|
};

SpectralInstance spectral_instance(const Observable& obs,
                                   const PrepCircuit& v);

// Sequential encoding of all terms with tau_j = s_j epsilon |a_j|.
MemoryState encode_observable_spectral(const Observable& obs,
                                       const SpectralInstance& instance,
                                       const std::vector<int>& signs,
                                       const EncodingConfig& config);

// Circuit backend: the Fig.-style query sequence on the joint state, one
// memory-dressed controlled-U_Pj per phase, closed by the boundary rotation.
void encode_round_circuit(StateVector& state, const QspPhasePlan& plan,
                          const PrepCircuit& v, const PauliString& p);

// Full joint-state encoding; plan for term j uses tau = -epsilon a_j (the
// signal angle of U_Pj is arccos(-<P_j>), so the signed coefficient alone
// reproduces the spectral phase without consuming sign estimates).
StateVector encode_observable_circuit(const Observable& obs,
                                      const PrepCircuit& v,
                                      const EncodingConfig& config);

struct PhaseProbabilities {
  double p_x0 = 1.0;
  double p_y0 = 0.5;
};

PhaseProbabilities memory_probabilities(const MemoryState& memory);
PhaseProbabilities memory_probabilities(const StateVector& joint);

// Depolarize toward 1/2 with probability p, then apply additive tomography
// offsets (clamped into [0, 1]).
PhaseProbabilities apply_phase_noise(PhaseProbabilities probs, double p,
                                     double delta_x, double delta_y);

struct SampleCounts {
  int x0 = 0, x_shots = 0;
  int y0 = 0, y_shots = 0;
};

SampleCounts sample_phase(const PhaseProbabilities& probs, int shots_per_basis,
                          Rng& rng);

// ---------------------------------------------------------------------------
// Step 3: angle estimation and the phase-wrapping ladder
// ---------------------------------------------------------------------------

struct DegenerateSampleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AngleEstimate {
  double phi_a = 0.0;      // in (-pi/2, pi/2]
  double two_phi_a = 0.0;  // in (-pi, pi]
  double cos_est = 1.0;
  double sin_est = 0.0;
};

// Quadrant-resolved inversion of P(X=0) = (1+cos 2phi)/2,
// P(Y=0) = (1-sin 2phi)/2; reduces to Q = tan(2phi) in each quadrant.
AngleEstimate estimate_angle(const SampleCounts& counts);

struct LadderSchedule {
  double eps0 = 0.1;
  int d_l = 4;
  int alpha = 3;
  int gamma = 3;

  int shots_at(int level) const { return alpha + gamma * (d_l - level); }
  int total_shots() const;  // M_q = sum over levels 0..d_l

  // d_L = floor(log2(1/eta)), eps0 = min(pi/2^{d_L+1}, pi/sum|a_j|).
  static LadderSchedule for_eta(double eta, double weight_l1, int alpha = 3,
                                int gamma = 3);
  void validate() const;
};

struct LadderError : std::runtime_error {
  LadderError(const std::string& msg, int lvl)
      : std::runtime_error(msg), level(lvl) {}
  int level;
};

struct LevelDiagnostics {
  int level = 0;
  int shots_per_basis = 0;
  double xi_hat = 0.0;         // measured doubled angle at this level
  double window_center = 0.0;  // running estimate before this level's update
};

struct LadderResult {
  double p_sum_hat = 0.0;
  double final_halfwidth = 0.0;  // on the P_sum scale
  std::vector<LevelDiagnostics> per_level;
};

// Probabilities of the encoded memory qubit as a function of the level scale
// 2^l eps0; backends and noise wrappers plug in here.
using PhaseModel = std::function<PhaseProbabilities(double epsilon_scale)>;

PhaseModel injected_phase_model(double p_sum);

LadderResult ladder_estimate(const PhaseModel& model,
                             const LadderSchedule& schedule, Rng& rng);

// ---------------------------------------------------------------------------
// Full protocol
// ---------------------------------------------------------------------------

struct CpsOptions {
  CpsBackend backend = CpsBackend::Spectral;
  std::optional<double> eps0;
  std::optional<int> sign_shots;
  std::optional<int> d_l;
  int alpha = 3;
  int gamma = 3;
  std::vector<InjectedQspError> injected;
  std::optional<std::vector<int>> forced_signs;  // testing hook
  double plan_eps_target = 0.0;  // 0 -> sqrt(eta)/N
  std::uint64_t plan_seed = 0x9d2c5680u;
  // Distribution-level noise: depolarization probability per preparation and
  // additive tomography offsets.
  double depolarize_p = 0.0;
  double delta_x = 0.0;
  double delta_y = 0.0;
  std::optional<int> n_qsp_accounting;  // override for the T formula
};

struct CpsResult {
  double estimate = 0.0;
  double variance = 0.0;  // filled by multi-trial drivers; NaN for one trial
  long long state_preparations = 0;  // T = N (n_qsp M_q + n1)
  int n_qsp_used = 0;
  int sign_shots = 0;
  double eps0 = 0.0;
  int d_l = 0;
  int alpha = 3;
  int gamma = 3;
  int m_q = 0;
  double final_halfwidth = 0.0;
  double flagged_bias_bound = 0.0;
  std::vector<int> signs;
  std::vector<std::size_t> flagged_terms;
  std::vector<LevelDiagnostics> per_level;

  std::string to_json() const;
};

CpsResult cps_estimate(const Observable& obs, const PrepCircuit& v, double eta,
                       const CpsOptions& options, Rng& rng);

}  // namespace cps
