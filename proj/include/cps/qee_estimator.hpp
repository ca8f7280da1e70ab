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
#include <vector>

#include "cps/pauli.hpp"
#include "cps/rng.hpp"
#include "cps/statevector.hpp"

namespace cps {

enum class ShotAllocation { Uniform, Weighted };

struct QeeResult {
  double estimate = 0.0;
  std::vector<double> per_term_means;
  std::vector<long long> per_term_shots;
  // N/M_c * sum a_j^2 (1 - <P_j>^2) evaluated with empirical means.
  double variance_analytic = 0.0;
  long long state_preparations = 0;

  std::string to_json() const;
};

struct AllocationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shot-noise-limited baseline: every Pauli string measured independently in
// its eigenbasis (single layer of basis rotations + parity readout), then a
// classical weighted sum.
QeeResult qee_estimate(const Observable& obs, const PrepCircuit& v,
                       long long total_shots, ShotAllocation allocation,
                       Rng& rng);

}  // namespace cps
