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
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cps {

// Bessel function of the first kind J_m, ascending power series with
// term-wise cutoff at relative 1e-16. Restricted to the protocol regime
// |tau| <= 4.
double bessel_j(int m, double tau);

// Tail bound 4 |e tau / (2(k+1))|^{k+1} for truncating the Jacobi-Anger
// expansion after harmonic k (valid for |tau| <= k).
double jacobi_anger_tail_bound(double tau, int k);

// Smallest k >= max(1, ceil|tau|) whose tail bound is <= eps_target.
int truncation_order(double tau, double eps_target);

// Truncated, rescaled Jacobi-Anger expansion of exp(i tau cos theta):
//   A(theta) ~ cos(tau cos theta)  as sum of cos(2m theta),
//   C(theta) ~ sin(tau cos theta)  as sum of cos((2m-1) theta).
struct JacobiAngerSeries {
  double tau = 0.0;
  int order_k = 0;
  std::vector<double> cos_coeffs;        // index m -> coeff of cos(2m theta)
  std::vector<double> sin_series_coeffs; // index m-1 -> coeff of cos((2m-1) theta)
  double rescale = 1.0;                  // 1 / (1 + tail_bound)
  double tail_bound = 0.0;

  double eval_a(double theta) const;
  double eval_c(double theta) const;
};

JacobiAngerSeries target_series(double tau, int k);

// Product R_phi_n(theta) ... R_phi_1(theta) of the single-qubit rotations
// R_phi(theta) = exp(-i(theta/2)(sx cos phi + sy sin phi)), decomposed as
// A I + i B sz + i C sx + i D sy.
struct SequenceValue {
  double a = 1.0, b = 0.0, c = 0.0, d = 0.0;
};

SequenceValue evaluate_sequence(std::span<const double> phases, double theta);

struct QspPhasePlan {
  double tau = 0.0;
  std::vector<double> phases;
  double eps_certified = 0.0;
  int n_qsp = 0;

  std::string to_json() const;
  static QspPhasePlan from_json(const std::string& text);
};

// Scalar encoding response of a plan at signal angle theta. The sequence is
// closed by the boundary rotation exp(i tau sz), pinned by the theta = 0
// identity constraint of the rotation product, so the response is
// e^{i tau} (A + iB)(theta) and the certified target is e^{i tau cos theta}.
std::complex<double> plan_response(const QspPhasePlan& plan, double theta);

// Certified error: max over a uniform theta grid of the Frobenius deviation
// of the boundary-closed sequence from exp(i tau cos theta sz). This
// dominates the scalar response error AND the inter-branch leakage, so
// downstream trace-distance bounds of the form 2 N eps hold.
double certify_plan(const QspPhasePlan& plan, int grid_points);

struct SynthesisError : std::runtime_error {
  SynthesisError(const std::string& msg, double best)
      : std::runtime_error(msg), best_error(best) {}
  double best_error;
};

// Multi-start quasi-Newton fit of the phase vector (length 2 order_k) to the
// series target; the returned eps_certified is measured on a 2048-point grid,
// never assumed. Throws SynthesisError if the best start stays above 4x the
// series tail bound.
QspPhasePlan synthesize_phases(const JacobiAngerSeries& series,
                               std::uint64_t seed = 0x9d2c5680u);

// Convenience: picks k = truncation_order(tau, eps_target / 4) so that the
// <= 4x-tail synthesis contract lands at or below eps_target.
QspPhasePlan synthesize_for_target(double tau, double eps_target,
                                   std::uint64_t seed = 0x9d2c5680u);

// Per-string query count ln(N / sqrt(eta)) / ln ln(N / sqrt(eta)).
double qsp_query_count(double num_strings, double eta);

}  // namespace cps
