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

#include "cps/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cps {

namespace {

constexpr Amplitude kImag{0.0, 1.0};

void check_qubit(const StateVector& state, int q, const char* what) {
  if (q < 0 || static_cast<std::size_t>(q) >= state.num_qubits())
    throw CircuitError(std::string(what) + ": qubit index " +
                       std::to_string(q) + " out of range");
}

// 2x2 unitary on one qubit, in place.
void apply_1q(StateVector& state, int q, const Amplitude m[2][2]) {
  check_qubit(state, q, "apply_gate");
  const std::size_t mask = std::size_t{1} << q;
  const std::size_t dim = state.amps.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & mask) continue;
    const Amplitude a0 = state.amps[i];
    const Amplitude a1 = state.amps[i | mask];
    state.amps[i] = m[0][0] * a0 + m[0][1] * a1;
    state.amps[i | mask] = m[1][0] * a0 + m[1][1] * a1;
  }
}

}  // namespace

StateVector StateVector::zero_state(std::size_t n, bool with_memory) {
  StateVector s;
  s.num_processing = n;
  s.has_memory = with_memory;
  s.amps.assign(std::size_t{1} << s.num_qubits(), Amplitude{0.0, 0.0});
  s.amps[0] = 1.0;
  return s;
}

double StateVector::norm_sq() const {
  double total = 0.0;
  for (const Amplitude& a : amps) total += std::norm(a);
  return total;
}

Amplitude inner_product(const StateVector& a, const StateVector& b) {
  if (a.amps.size() != b.amps.size())
    throw CircuitError("inner_product: dimension mismatch");
  Amplitude acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.amps.size(); ++i)
    acc += std::conj(a.amps[i]) * b.amps[i];
  return acc;
}

Gate Gate::inverse() const {
  Gate g = *this;
  switch (kind) {
    case GateKind::S: g.kind = GateKind::Sdg; break;
    case GateKind::Sdg: g.kind = GateKind::S; break;
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ: g.angle = -angle; break;
    default: break;  // H, X, Y, Z, CNOT, reflections, Pauli strings: self-inverse
  }
  return g;
}

PrepCircuit PrepCircuit::inverse() const {
  PrepCircuit inv;
  inv.gates.reserve(gates.size());
  for (auto it = gates.rbegin(); it != gates.rend(); ++it)
    inv.gates.push_back(it->inverse());
  return inv;
}

PrepCircuit PrepCircuit::parse(std::string_view text) {
  PrepCircuit c;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name;
    if (!(fields >> name)) continue;
    auto want_int = [&](const char* what) {
      long long v;
      if (!(fields >> v) || v < 0)
        throw CircuitError("line " + std::to_string(line_no) + ": bad " +
                           what + " for gate " + name);
      return static_cast<int>(v);
    };
    auto want_angle = [&]() {
      double v;
      if (!(fields >> v))
        throw CircuitError("line " + std::to_string(line_no) +
                           ": missing angle for gate " + name);
      return v;
    };
    if (name == "H") c.gates.push_back(Gate::h(want_int("target")));
    else if (name == "X") c.gates.push_back(Gate::x(want_int("target")));
    else if (name == "Y") c.gates.push_back(Gate::y(want_int("target")));
    else if (name == "Z") c.gates.push_back(Gate::z(want_int("target")));
    else if (name == "S") c.gates.push_back(Gate::s(want_int("target")));
    else if (name == "SDG") c.gates.push_back(Gate::sdg(want_int("target")));
    else if (name == "RX") { int q = want_int("target"); c.gates.push_back(Gate::rx(q, want_angle())); }
    else if (name == "RY") { int q = want_int("target"); c.gates.push_back(Gate::ry(q, want_angle())); }
    else if (name == "RZ") { int q = want_int("target"); c.gates.push_back(Gate::rz(q, want_angle())); }
    else if (name == "CNOT") {
      int ctrl = want_int("control");
      int tgt = want_int("target");
      if (ctrl == tgt)
        throw CircuitError("line " + std::to_string(line_no) +
                           ": CNOT control equals target");
      c.gates.push_back(Gate::cnot(ctrl, tgt));
    } else {
      throw CircuitError("line " + std::to_string(line_no) +
                         ": unknown gate '" + name + "'");
    }
    std::string extra;
    if (fields >> extra)
      throw CircuitError("line " + std::to_string(line_no) +
                         ": trailing token '" + extra + "'");
  }
  return c;
}

PrepCircuit PrepCircuit::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CircuitError("cannot open circuit file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string PrepCircuit::serialize() const {
  std::string out;
  char num[64];
  for (const Gate& g : gates) {
    switch (g.kind) {
      case GateKind::H: out += "H " + std::to_string(g.q0); break;
      case GateKind::X: out += "X " + std::to_string(g.q0); break;
      case GateKind::Y: out += "Y " + std::to_string(g.q0); break;
      case GateKind::Z: out += "Z " + std::to_string(g.q0); break;
      case GateKind::S: out += "S " + std::to_string(g.q0); break;
      case GateKind::Sdg: out += "SDG " + std::to_string(g.q0); break;
      case GateKind::RX:
      case GateKind::RY:
      case GateKind::RZ: {
        const char* name = g.kind == GateKind::RX   ? "RX"
                           : g.kind == GateKind::RY ? "RY"
                                                    : "RZ";
        std::snprintf(num, sizeof(num), "%s %d %.17g", name, g.q0, g.angle);
        out += num;
        break;
      }
      case GateKind::CNOT:
        out += "CNOT " + std::to_string(g.q0) + " " + std::to_string(g.q1);
        break;
      default:
        throw CircuitError("cannot serialize protocol gate");
    }
    out += '\n';
  }
  return out;
}

void apply_pauli_string(StateVector& state, const PauliString& p,
                        bool controlled_on_memory) {
  if (p.size() != state.num_processing)
    throw CircuitError("apply_pauli_string: string length mismatch");
  if (controlled_on_memory && !state.has_memory)
    throw CircuitError("apply_pauli_string: no memory qubit to control on");

  std::size_t flip = 0, y_mask = 0, z_mask = 0;
  for (std::size_t q = 0; q < p.size(); ++q) {
    switch (p.axes[q]) {
      case PauliAxis::X: flip |= std::size_t{1} << q; break;
      case PauliAxis::Y:
        flip |= std::size_t{1} << q;
        y_mask |= std::size_t{1} << q;
        break;
      case PauliAxis::Z: z_mask |= std::size_t{1} << q; break;
      case PauliAxis::I: break;
    }
  }
  const std::size_t ctrl_mask =
      controlled_on_memory ? (std::size_t{1} << state.memory_index()) : 0;

  // P|b> = phase(b) |b xor flip>: each Y gives +/-i, each Z gives (-1)^bit.
  auto phase_of = [&](std::size_t b) -> Amplitude {
    const int y_ones = __builtin_popcountll(b & y_mask);
    const int y_total = __builtin_popcountll(y_mask);
    const int z_ones = __builtin_popcountll(b & z_mask);
    // product over Y sites of (bit ? -i : +i) = i^{#Y} * (-1)^{#Y ones}
    Amplitude ph{1.0, 0.0};
    switch (y_total & 3) {
      case 1: ph = kImag; break;
      case 2: ph = -1.0; break;
      case 3: ph = -kImag; break;
      default: break;
    }
    if ((y_ones + z_ones) & 1) ph = -ph;
    return ph;
  };

  const std::size_t dim = state.amps.size();
  if (flip == 0) {
    for (std::size_t b = 0; b < dim; ++b) {
      if (ctrl_mask && !(b & ctrl_mask)) continue;
      state.amps[b] *= phase_of(b);
    }
    return;
  }
  for (std::size_t b = 0; b < dim; ++b) {
    const std::size_t partner = b ^ flip;
    if (b > partner) continue;
    if (ctrl_mask && !(b & ctrl_mask)) continue;
    const Amplitude ab = state.amps[b];
    const Amplitude ap = state.amps[partner];
    state.amps[partner] = phase_of(b) * ab;
    state.amps[b] = phase_of(partner) * ap;
  }
}

void apply_gate(StateVector& state, const Gate& gate) {
  switch (gate.kind) {
    case GateKind::H: {
      const double s = 1.0 / std::sqrt(2.0);
      const Amplitude m[2][2] = {{s, s}, {s, -s}};
      apply_1q(state, gate.q0, m);
      return;
    }
    case GateKind::X: {
      const Amplitude m[2][2] = {{0.0, 1.0}, {1.0, 0.0}};
      apply_1q(state, gate.q0, m);
      return;
    }
    case GateKind::Y: {
      const Amplitude m[2][2] = {{0.0, -kImag}, {kImag, 0.0}};
      apply_1q(state, gate.q0, m);
      return;
    }
    case GateKind::Z: {
      const Amplitude m[2][2] = {{1.0, 0.0}, {0.0, -1.0}};
      apply_1q(state, gate.q0, m);
      return;
    }
    case GateKind::S: {
      const Amplitude m[2][2] = {{1.0, 0.0}, {0.0, kImag}};
      apply_1q(state, gate.q0, m);
      return;
    }
    case GateKind::Sdg: {
      const Amplitude m[2][2] = {{1.0, 0.0}, {0.0, -kImag}};
      apply_1q(state, gate.q0, m);
      return;
    }
    case GateKind::RX: {
      const double c = std::cos(gate.angle / 2), s = std::sin(gate.angle / 2);
      const Amplitude m[2][2] = {{c, -kImag * s}, {-kImag * s, c}};
      apply_1q(state, gate.q0, m);
      return;
    }
    case GateKind::RY: {
      const double c = std::cos(gate.angle / 2), s = std::sin(gate.angle / 2);
      const Amplitude m[2][2] = {{c, -s}, {s, c}};
      apply_1q(state, gate.q0, m);
      return;
    }
    case GateKind::RZ: {
      const Amplitude e0 = std::exp(-kImag * (gate.angle / 2));
      const Amplitude e1 = std::exp(kImag * (gate.angle / 2));
      const Amplitude m[2][2] = {{e0, 0.0}, {0.0, e1}};
      apply_1q(state, gate.q0, m);
      return;
    }
    case GateKind::CNOT: {
      check_qubit(state, gate.q0, "CNOT control");
      check_qubit(state, gate.q1, "CNOT target");
      if (gate.q0 == gate.q1)
        throw CircuitError("CNOT control equals target");
      const std::size_t cmask = std::size_t{1} << gate.q0;
      const std::size_t tmask = std::size_t{1} << gate.q1;
      for (std::size_t i = 0; i < state.amps.size(); ++i) {
        if ((i & cmask) && !(i & tmask))
          std::swap(state.amps[i], state.amps[i | tmask]);
      }
      return;
    }
    case GateKind::Reflection:
    case GateKind::ControlledReflection: {
      const bool controlled = gate.kind == GateKind::ControlledReflection;
      if (controlled && !state.has_memory)
        throw CircuitError("ControlledReflection: no memory qubit");
      const std::size_t proc_mask =
          (std::size_t{1} << state.num_processing) - 1;
      const std::size_t ctrl_mask =
          controlled ? (std::size_t{1} << state.memory_index()) : 0;
      for (std::size_t i = 0; i < state.amps.size(); ++i) {
        if ((i & proc_mask) != 0) continue;
        if (ctrl_mask && !(i & ctrl_mask)) continue;
        state.amps[i] = -state.amps[i];
      }
      return;
    }
    case GateKind::ControlledPauliString:
      apply_pauli_string(state, gate.string, /*controlled_on_memory=*/true);
      return;
  }
  throw CircuitError("unhandled gate kind");
}

void apply_circuit(StateVector& state, const PrepCircuit& circuit) {
  for (const Gate& g : circuit.gates) {
    if (g.kind == GateKind::Reflection ||
        g.kind == GateKind::ControlledReflection ||
        g.kind == GateKind::ControlledPauliString)
      throw CircuitError("protocol gate inside a preparation circuit");
    if (g.q0 >= static_cast<int>(state.num_processing) ||
        g.q1 >= static_cast<int>(state.num_processing))
      throw CircuitError("preparation circuit touches the memory qubit");
    apply_gate(state, g);
  }
}

StateVector prepare(const PrepCircuit& circuit, std::size_t n,
                    bool with_memory) {
  StateVector state = StateVector::zero_state(n, with_memory);
  apply_circuit(state, circuit);
  return state;
}

void apply_u_pj(StateVector& state, const PrepCircuit& v, const PauliString& p,
                bool controlled) {
  apply_pauli_string(state, p, controlled);
  apply_circuit(state, v.inverse());
  apply_gate(state, controlled ? Gate::controlled_reflection()
                               : Gate::reflection());
  apply_circuit(state, v);
}

void apply_u_pj_dagger(StateVector& state, const PrepCircuit& v,
                       const PauliString& p, bool controlled) {
  apply_circuit(state, v.inverse());
  apply_gate(state, controlled ? Gate::controlled_reflection()
                               : Gate::reflection());
  apply_circuit(state, v);
  apply_pauli_string(state, p, controlled);
}

double principal_angle(const PrepCircuit& v, const PauliString& p,
                       std::size_t n) {
  StateVector psi0 = prepare(v, n, false);
  StateVector psij = psi0;
  apply_pauli_string(psij, p, false);
  const double overlap = std::abs(inner_product(psi0, psij));
  return std::acos(std::clamp(overlap, 0.0, 1.0));
}

namespace {

void rotate_to_z(StateVector& state, std::size_t qubit, Basis basis,
                 bool forward) {
  switch (basis) {
    case Basis::Z:
      return;
    case Basis::X:
      apply_gate(state, Gate::h(static_cast<int>(qubit)));
      return;
    case Basis::Y:
      // forward: Sdg then H maps the +1 eigenstate |y+> to |0>
      if (forward) {
        apply_gate(state, Gate::sdg(static_cast<int>(qubit)));
        apply_gate(state, Gate::h(static_cast<int>(qubit)));
      } else {
        apply_gate(state, Gate::h(static_cast<int>(qubit)));
        apply_gate(state, Gate::s(static_cast<int>(qubit)));
      }
      return;
  }
}

}  // namespace

int measure(StateVector& state, std::size_t qubit, Basis basis, Rng& rng) {
  check_qubit(state, static_cast<int>(qubit), "measure");
  rotate_to_z(state, qubit, basis, /*forward=*/true);
  const std::size_t mask = std::size_t{1} << qubit;
  double p0 = 0.0;
  for (std::size_t i = 0; i < state.amps.size(); ++i)
    if (!(i & mask)) p0 += std::norm(state.amps[i]);
  const int outcome = rng.uniform() < p0 ? 0 : 1;
  double kept = 0.0;
  for (std::size_t i = 0; i < state.amps.size(); ++i) {
    const bool is_one = (i & mask) != 0;
    if (is_one != (outcome == 1))
      state.amps[i] = 0.0;
    else
      kept += std::norm(state.amps[i]);
  }
  if (kept < 1e-14)
    throw CircuitError("measure: degenerate norm after collapse");
  const double scale = 1.0 / std::sqrt(kept);
  for (Amplitude& a : state.amps) a *= scale;
  rotate_to_z(state, qubit, basis, /*forward=*/false);
  return outcome;
}

double parity_even_probability(const StateVector& state,
                               const PauliString& p) {
  if (p.size() != state.num_processing)
    throw CircuitError("parity_even_probability: string length mismatch");
  StateVector rotated = state;
  std::size_t mask = 0;
  for (std::size_t q = 0; q < p.size(); ++q) {
    switch (p.axes[q]) {
      case PauliAxis::I: continue;
      case PauliAxis::X:
        apply_gate(rotated, Gate::h(static_cast<int>(q)));
        break;
      case PauliAxis::Y:
        apply_gate(rotated, Gate::sdg(static_cast<int>(q)));
        apply_gate(rotated, Gate::h(static_cast<int>(q)));
        break;
      case PauliAxis::Z: break;
    }
    mask |= std::size_t{1} << q;
  }
  double even = 0.0;
  for (std::size_t i = 0; i < rotated.amps.size(); ++i)
    if (!(__builtin_popcountll(i & mask) & 1)) even += std::norm(rotated.amps[i]);
  return even;
}

double expectation_exact(const Observable& obs, const StateVector& state) {
  obs.validate();
  if (obs.num_qubits() != state.num_processing)
    throw CircuitError("expectation_exact: qubit count mismatch");
  const double norm = state.norm_sq();
  if (std::abs(norm - 1.0) > 1e-8)
    throw CircuitError("expectation_exact: state is not normalized");
  Amplitude total{0.0, 0.0};
  for (const PauliTerm& term : obs.terms) {
    StateVector t = state;
    apply_pauli_string(t, term.string, false);
    total += term.coefficient * inner_product(state, t);
  }
  if (std::abs(total.imag()) >= 1e-10)
    throw CircuitError("expectation_exact: residual imaginary part " +
                       std::to_string(total.imag()));
  return total.real();
}

}  // namespace cps
