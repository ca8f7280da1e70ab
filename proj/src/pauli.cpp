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

#include "cps/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace cps {

PauliAxis axis_from_char(char c) {
  switch (c) {
    case 'I': return PauliAxis::I;
    case 'X': return PauliAxis::X;
    case 'Y': return PauliAxis::Y;
    case 'Z': return PauliAxis::Z;
    default:
      throw ParseError(std::string("unknown Pauli letter '") + c + "'");
  }
}

char axis_to_char(PauliAxis a) { return static_cast<char>(a); }

PauliString::PauliString(std::string_view letters) {
  axes.reserve(letters.size());
  for (char c : letters) axes.push_back(axis_from_char(c));
}

bool PauliString::is_identity() const {
  return std::all_of(axes.begin(), axes.end(),
                     [](PauliAxis a) { return a == PauliAxis::I; });
}

std::string PauliString::str() const {
  std::string out;
  out.reserve(axes.size());
  for (PauliAxis a : axes) out.push_back(axis_to_char(a));
  return out;
}

std::vector<std::size_t> Observable::duplicate_terms() const {
  std::vector<std::size_t> dups;
  std::set<std::string> seen;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (!seen.insert(terms[j].string.str()).second) dups.push_back(j);
  }
  return dups;
}

void Observable::validate() const {
  if (terms.empty()) throw ParseError("observable has no terms");
  const std::size_t n = terms.front().string.size();
  if (n == 0) throw ParseError("observable has zero qubits");
  for (const PauliTerm& t : terms) {
    if (t.string.size() != n)
      throw ParseError("Pauli strings have mixed lengths");
    if (!std::isfinite(t.coefficient))
      throw ParseError("non-finite coefficient");
  }
}

ObservableStats observable_stats(const Observable& obs) {
  ObservableStats s;
  s.num_terms = obs.num_terms();
  s.num_qubits = obs.num_qubits();
  for (const PauliTerm& t : obs.terms) {
    s.weight_l1 += std::abs(t.coefficient);
    s.weight_max = std::max(s.weight_max, std::abs(t.coefficient));
  }
  s.has_duplicates = !obs.duplicate_terms().empty();
  return s;
}

Observable parse_observable(std::string_view text) {
  Observable obs;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string coeff_text, letters, extra;
    if (!(fields >> coeff_text)) continue;  // blank or comment-only line
    if (!(fields >> letters))
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected '<coefficient> <letters>'");
    if (fields >> extra)
      throw ParseError("line " + std::to_string(line_no) +
                       ": trailing token '" + extra + "'");
    double coeff = 0.0;
    std::size_t used = 0;
    try {
      coeff = std::stod(coeff_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != coeff_text.size() || !std::isfinite(coeff))
      throw ParseError("line " + std::to_string(line_no) +
                       ": bad real coefficient '" + coeff_text + "'");
    PauliTerm term;
    term.coefficient = coeff;
    try {
      term.string = PauliString(letters);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obs.terms.empty() &&
        term.string.size() != obs.terms.front().string.size())
      throw ParseError("line " + std::to_string(line_no) +
                       ": string length " + std::to_string(term.string.size()) +
                       " mismatches first term's " +
                       std::to_string(obs.terms.front().string.size()));
    obs.terms.push_back(std::move(term));
  }
  if (obs.terms.empty()) throw ParseError("empty observable");
  return obs;
}

Observable load_observable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open observable file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_observable(buf.str());
}

std::string serialize_observable(const Observable& obs) {
  std::string out;
  char num[64];
  for (const PauliTerm& t : obs.terms) {
    std::snprintf(num, sizeof(num), "%.17g", t.coefficient);
    out += num;
    out += ' ';
    out += t.string.str();
    out += '\n';
  }
  return out;
}

Observable random_observable(std::size_t n, std::size_t num_terms,
                             double coeff_scale, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_observable: n must be >= 1");
  if (num_terms < 1)
    throw std::invalid_argument("random_observable: N must be >= 1");
  Rng rng(seed);
  Observable obs;
  obs.terms.reserve(num_terms);
  constexpr PauliAxis kAxes[4] = {PauliAxis::I, PauliAxis::X, PauliAxis::Y,
                                  PauliAxis::Z};
  for (std::size_t j = 0; j < num_terms; ++j) {
    PauliTerm term;
    term.coefficient = rng.uniform(-coeff_scale, coeff_scale);
    do {
      term.string.axes.clear();
      for (std::size_t q = 0; q < n; ++q)
        term.string.axes.push_back(kAxes[rng.uniform_below(4)]);
    } while (term.string.is_identity());
    obs.terms.push_back(std::move(term));
  }
  return obs;
}

}  // namespace cps
