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
#include <utility>

#include "cps/rng.hpp"

namespace cps {

// Distribution-level gate-error model: with probability p the memory qubit's
// statistics are replaced by the uniform mixture; tomography may carry
// additive offsets delta_x, delta_y on top.
struct NoiseModel {
  double p1 = 0.0;       // single-gate error probability
  double delta_x = 0.0;  // additive tomography errors (sup over scales)
  double delta_y = 0.0;

  // p ~ 3 p1 n per QSP round.
  double per_round_p(std::size_t n_qubits) const {
    return 3.0 * p1 * static_cast<double>(n_qubits);
  }
  // Probability of at least one error across rounds preparations.
  double total_p(std::size_t n_qubits, long long rounds) const;

  // delta below 1/sqrt(8) keeps the ladder's Heisenberg scaling.
  bool deltas_within_robust_bound() const;
};

// P(X=0) = (1-p)(1+cos 2phi)/2 + p/2 and P(Y=0) = (1-p)(1-sin 2phi)/2 + p/2.
std::pair<double, double> depolarized_distributions(double phi_a, double p);

struct NoisyAngleBias {
  double phi_a_hat = 0.0;
  double q_bias = 0.0;        // |Q(phi_hat) - tan(2 phi_a)|
  double bound = 0.0;         // 2p + 5 sigma_statistical
  bool within_bound = false;
};

// Monte Carlo estimate of the angle under depolarized sampling and its
// deviation from the clean tangent.
NoisyAngleBias noisy_angle_bias(double phi_a, double p, int shots_per_basis,
                                Rng& rng);

}  // namespace cps
