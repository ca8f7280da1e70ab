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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cps/rng.hpp"

namespace cps {

enum class PauliAxis : char { I = 'I', X = 'X', Y = 'Y', Z = 'Z' };

PauliAxis axis_from_char(char c);
char axis_to_char(PauliAxis a);

// Tensor product of single-qubit Paulis. axes[k] acts on qubit k, so the
// leftmost letter of the text form is qubit 0.
struct PauliString {
  std::vector<PauliAxis> axes;

  PauliString() = default;
  explicit PauliString(std::string_view letters);

  std::size_t size() const { return axes.size(); }
  bool is_identity() const;
  std::string str() const;

  bool operator==(const PauliString& other) const = default;
};

struct PauliTerm {
  double coefficient = 0.0;
  PauliString string;
};

// Weighted sum of Pauli strings with real coefficients. Duplicate strings are
// kept as-is; the term count is part of the protocol's cost model.
struct Observable {
  std::vector<PauliTerm> terms;

  std::size_t num_terms() const { return terms.size(); }
  std::size_t num_qubits() const {
    return terms.empty() ? 0 : terms.front().string.size();
  }

  // Indices of terms whose string already appeared earlier in the list.
  std::vector<std::size_t> duplicate_terms() const;

  void validate() const;
};

struct ObservableStats {
  double weight_l1 = 0.0;   // sum |a_j|
  double weight_max = 0.0;  // max |a_j|
  std::size_t num_terms = 0;
  std::size_t num_qubits = 0;
  bool has_duplicates = false;
};

ObservableStats observable_stats(const Observable& obs);

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Line-oriented text format: "<coefficient> <axis letters>" per term, '#'
// starts a comment. Coefficients must be real.
Observable parse_observable(std::string_view text);
Observable load_observable(const std::string& path);

// Canonical serialization: "%.17g" coefficients, one term per line.
std::string serialize_observable(const Observable& obs);

// N uniformly random non-identity strings on n qubits, coefficients uniform
// in [-coeff_scale, coeff_scale]. Deterministic in the seed.
Observable random_observable(std::size_t n, std::size_t num_terms,
                             double coeff_scale, std::uint64_t seed);

}  // namespace cps
