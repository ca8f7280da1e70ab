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
#include <string>
#include <vector>

#include "cps/pauli.hpp"
#include "cps/rng.hpp"

namespace cps {

using Amplitude = std::complex<double>;

// Dense statevector over n processing qubits plus an optional memory qubit.
// Qubit k maps to bit k of the amplitude index; the memory qubit, when
// present, is the highest bit (index n).
struct StateVector {
  std::vector<Amplitude> amps;
  std::size_t num_processing = 0;
  bool has_memory = false;

  static StateVector zero_state(std::size_t n, bool with_memory);

  std::size_t num_qubits() const {
    return num_processing + (has_memory ? 1 : 0);
  }
  std::size_t memory_index() const { return num_processing; }
  double norm_sq() const;
};

Amplitude inner_product(const StateVector& a, const StateVector& b);

enum class GateKind {
  H, X, Y, Z, S, Sdg, RX, RY, RZ, CNOT,
  Reflection,             // I - 2|0...0><0...0| on the processing register
  ControlledReflection,   // same, controlled on the memory qubit
  ControlledPauliString,  // Pauli string on processing, memory-controlled
};

struct Gate {
  GateKind kind = GateKind::H;
  int q0 = -1;     // target (control for CNOT)
  int q1 = -1;     // CNOT target
  double angle = 0.0;
  PauliString string;

  static Gate make(GateKind kind, int q0 = -1, int q1 = -1,
                   double angle = 0.0) {
    Gate g;
    g.kind = kind;
    g.q0 = q0;
    g.q1 = q1;
    g.angle = angle;
    return g;
  }
  static Gate h(int q) { return make(GateKind::H, q); }
  static Gate x(int q) { return make(GateKind::X, q); }
  static Gate y(int q) { return make(GateKind::Y, q); }
  static Gate z(int q) { return make(GateKind::Z, q); }
  static Gate s(int q) { return make(GateKind::S, q); }
  static Gate sdg(int q) { return make(GateKind::Sdg, q); }
  static Gate rx(int q, double a) { return make(GateKind::RX, q, -1, a); }
  static Gate ry(int q, double a) { return make(GateKind::RY, q, -1, a); }
  static Gate rz(int q, double a) { return make(GateKind::RZ, q, -1, a); }
  static Gate cnot(int control, int target) {
    return make(GateKind::CNOT, control, target);
  }
  static Gate reflection() { return make(GateKind::Reflection); }
  static Gate controlled_reflection() {
    return make(GateKind::ControlledReflection);
  }
  static Gate controlled_pauli(PauliString p) {
    Gate g = make(GateKind::ControlledPauliString);
    g.string = std::move(p);
    return g;
  }

  Gate inverse() const;
};

struct CircuitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invertible preparation circuit V acting on processing qubits only.
struct PrepCircuit {
  std::vector<Gate> gates;

  // Reversed gate list with each gate inverted; exact structural inverse.
  PrepCircuit inverse() const;

  static PrepCircuit parse(std::string_view text);
  static PrepCircuit load(const std::string& path);
  std::string serialize() const;
};

StateVector prepare(const PrepCircuit& circuit, std::size_t n,
                    bool with_memory);

void apply_gate(StateVector& state, const Gate& gate);
void apply_circuit(StateVector& state, const PrepCircuit& circuit);

// Pauli string on the processing register; when controlled, only the
// memory=1 half of the state is touched.
void apply_pauli_string(StateVector& state, const PauliString& p,
                        bool controlled_on_memory);

// U_P = V Pi0 V^dag P applied right-to-left: P, V^dag, Pi0, V. Only P and
// Pi0 carry the memory control; the preparation circuit never does.
void apply_u_pj(StateVector& state, const PrepCircuit& v, const PauliString& p,
                bool controlled);

// U_P^dag = P V Pi0 V^dag: same pieces in reverse.
void apply_u_pj_dagger(StateVector& state, const PrepCircuit& v,
                       const PauliString& p, bool controlled);

// arccos |<Psi0| P |Psi0>|, clamped to [0, pi/2].
double principal_angle(const PrepCircuit& v, const PauliString& p,
                       std::size_t n);

enum class Basis { X, Y, Z };

// Projective measurement of one qubit in the given Pauli basis; outcome 0
// is the +1 eigenstate. Collapses and renormalizes in the original frame.
int measure(StateVector& state, std::size_t qubit, Basis basis, Rng& rng);

// Probability that measuring every non-identity position of `p` in its own
// basis yields even parity, i.e. (1 + <P>)/2 via the readout path.
double parity_even_probability(const StateVector& state, const PauliString& p);

// Sum_j a_j <Psi|P_j|Psi>; throws if the state is unnormalized, dimensions
// mismatch, or a residual imaginary part exceeds 1e-10.
double expectation_exact(const Observable& obs, const StateVector& state);

}  // namespace cps
