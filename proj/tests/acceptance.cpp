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
//
// End-to-end acceptance suite: one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cps/cps_estimator.hpp"
#include "cps/experiment.hpp"
#include "cps/noise.hpp"
#include "cps/qee_estimator.hpp"
#include "cps/qsp.hpp"
#include "cps/resources.hpp"
#include "oracles.hpp"

using namespace cps;
using Cx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += why;
    }
  }
  void note(const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double mx = oracle::mean_of(xs), my = oracle::mean_of(ys);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}

double wrap_angle(double x) {
  x = std::fmod(x + kPi, 2.0 * kPi);
  if (x < 0.0) x += 2.0 * kPi;
  return x - kPi;
}

// --------------------------------------------------------------------------
// 1. expectation_exact vs the dense Kronecker oracle
// --------------------------------------------------------------------------
Check criterion_1() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 2 + rng.uniform_below(3);       // 2..4
    const std::size_t terms = 1 + rng.uniform_below(10);  // 1..10
    const Observable obs =
        random_observable(n, terms, 1.5, 9000 + static_cast<std::uint64_t>(i));
    const PrepCircuit v =
        random_prep_circuit(n, 2, 9100 + static_cast<std::uint64_t>(i));
    const StateVector psi = prepare(v, n, false);
    const double engine = expectation_exact(obs, psi);
    const oracle::Vector vec = oracle::to_eigen(psi);
    const double oracle_value =
        (vec.adjoint() * oracle::observable_matrix(obs) * vec)(0, 0).real();
    worst = std::max(worst, std::abs(engine - oracle_value));
  }
  const double elapsed = seconds_since(t0);
  c.require(worst < 1e-10, "max deviation " + fmt(worst));
  c.require(elapsed < 10.0, "runtime " + fmt(elapsed) + " s");
  c.note("max |engine - oracle| = " + fmt(worst) + ", " + fmt(elapsed) + " s");
  return c;
}

// --------------------------------------------------------------------------
// 2. principal angle vs the 2x2 restriction of U_Pj
// --------------------------------------------------------------------------
Check criterion_2() {
  Check c;
  Rng rng(202);
  double worst = 0.0;
  int tested = 0;
  for (int i = 0; tested < 50; ++i) {
    const std::size_t n = 2 + rng.uniform_below(2);
    const PrepCircuit v =
        random_prep_circuit(n, 2, 8000 + static_cast<std::uint64_t>(i));
    Observable one =
        random_observable(n, 1, 1.0, 8100 + static_cast<std::uint64_t>(i));
    const PauliString& p = one.terms[0].string;

    oracle::Vector psi0 = oracle::Vector::Zero(Eigen::Index{1} << n);
    psi0(0) = 1.0;
    psi0 = oracle::circuit_matrix(v, n) * psi0;
    const oracle::Vector psij = oracle::string_matrix(p) * psi0;
    oracle::Vector e1 = psi0;
    oracle::Vector e2 = psij - (e1.adjoint() * psij)(0, 0) * e1;
    const double n2 = e2.norm();
    if (n2 < 1e-6) continue;  // |<P>| = 1: the restriction degenerates
    e2 /= n2;
    const oracle::Matrix um = oracle::u_pj_matrix(v, p, n);
    Eigen::Matrix2cd restricted;
    restricted << (e1.adjoint() * um * e1)(0, 0),
        (e1.adjoint() * um * e2)(0, 0), (e2.adjoint() * um * e1)(0, 0),
        (e2.adjoint() * um * e2)(0, 0);
    const Eigen::Vector2cd eig =
        Eigen::ComplexEigenSolver<Eigen::Matrix2cd>(restricted).eigenvalues();

    const double theta = principal_angle(v, p, n);
    const Cx tp = std::polar(1.0, theta), tm = std::polar(1.0, -theta);
    auto pair_err = [&](double sign) {
      const double e0 = std::min(std::abs(eig(0) - sign * tp),
                                 std::abs(eig(0) - sign * tm));
      const double e1v = std::min(std::abs(eig(1) - sign * tp),
                                  std::abs(eig(1) - sign * tm));
      return std::max(e0, e1v);
    };
    worst = std::max(worst, std::min(pair_err(1.0), pair_err(-1.0)));
    ++tested;
  }
  c.require(worst < 1e-9, "max eigenvalue deviation " + fmt(worst));
  c.note("50 instances, max deviation " + fmt(worst) +
         " (eigenvalues carry a global sign)");
  return c;
}

// --------------------------------------------------------------------------
// 3. QSP synthesis certification and the super-exponential tail bound
// --------------------------------------------------------------------------
Check criterion_3() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  double worst_margin = 0.0;
  for (double eps_target : {1e-2, 1e-4}) {
    for (double tau : {0.1, 0.3, 0.5, 1.0}) {
      try {
        const QspPhasePlan plan = synthesize_for_target(tau, eps_target);
        c.require(plan.eps_certified <= eps_target,
                  "tau " + fmt(tau) + " eps " + fmt(eps_target) +
                      ": certified " + fmt(plan.eps_certified));
        worst_margin =
            std::max(worst_margin, plan.eps_certified / eps_target);
      } catch (const SynthesisError& e) {
        c.require(false, "tau " + fmt(tau) + " eps " + fmt(eps_target) +
                             ": synthesis failed (" + fmt(e.best_error) + ")");
      }
      // truncated series respects the tail bound (before the rescale)
      const int k = truncation_order(tau, eps_target);
      const JacobiAngerSeries series = target_series(tau, k);
      double trunc = 0.0;
      for (int g = 0; g < 4096; ++g) {
        const double theta = kPi * g / 4095.0;
        const Cx approx = Cx{series.eval_a(theta), series.eval_c(theta)} *
                          (1.0 + series.tail_bound);
        trunc = std::max(trunc,
                         std::abs(approx - std::exp(Cx{0.0, tau * std::cos(theta)})));
      }
      c.require(trunc <= series.tail_bound * (1.0 + 1e-9),
                "tau " + fmt(tau) + ": truncation " + fmt(trunc) +
                    " above bound " + fmt(series.tail_bound));
    }
  }
  const double elapsed = seconds_since(t0);
  c.require(elapsed < 60.0, "runtime " + fmt(elapsed) + " s");
  c.note("worst certified/target ratio " + fmt(worst_margin) + ", " +
         fmt(elapsed) + " s");
  return c;
}

// --------------------------------------------------------------------------
// 4. circuit/spectral backend agreement within 2 N eps_certified
// --------------------------------------------------------------------------
Check criterion_4() {
  Check c;
  Rng seeder(404);
  double worst_ratio = 0.0;
  for (int inst = 0; inst < 5; ++inst) {
    const std::size_t n = 2 + (inst % 2);
    const std::size_t terms = 3 + 2 * (inst % 2);
    const Observable obs = random_observable(
        n, terms, 0.5, 4000 + static_cast<std::uint64_t>(inst));
    const PrepCircuit v =
        random_prep_circuit(n, 2, 4100 + static_cast<std::uint64_t>(inst));
    const double epsilon = 0.3;

    // per-term plans, tracking the worst certificate
    StateVector joint = prepare(v, n, true);
    apply_gate(joint, Gate::h(static_cast<int>(joint.memory_index())));
    double eps_cert = 0.0;
    for (const PauliTerm& term : obs.terms) {
      const QspPhasePlan plan =
          synthesize_for_target(-epsilon * term.coefficient, 1e-4);
      eps_cert = std::max(eps_cert, plan.eps_certified);
      encode_round_circuit(joint, plan, v, term.string);
    }

    const SpectralInstance instance = spectral_instance(obs, v);
    std::vector<int> signs;
    for (std::size_t j = 0; j < terms; ++j)
      signs.push_back(obs.terms[j].coefficient * instance.means[j] >= 0 ? 1
                                                                        : -1);
    EncodingConfig config;
    config.epsilon = epsilon;
    const MemoryState memory =
        encode_observable_spectral(obs, instance, signs, config);

    // trace distance between the reduced memory states
    const std::size_t regs = std::size_t{1} << n;
    Eigen::Matrix2cd rho_c = Eigen::Matrix2cd::Zero();
    for (std::size_t r = 0; r < regs; ++r) {
      Eigen::Vector2cd col;
      col << joint.amps[r], joint.amps[r + regs];
      rho_c += col * col.adjoint();
    }
    Eigen::Vector2cd mvec;
    mvec << memory.plus, memory.minus;
    const Eigen::Matrix2cd diff = rho_c - mvec * mvec.adjoint();
    const Eigen::Vector2cd eig =
        Eigen::ComplexEigenSolver<Eigen::Matrix2cd>(diff).eigenvalues();
    const double dist = 0.5 * (std::abs(eig(0)) + std::abs(eig(1)));
    const double budget = 2.0 * static_cast<double>(terms) * eps_cert;
    c.require(dist <= budget, "instance " + std::to_string(inst) +
                                  ": distance " + fmt(dist) + " > " +
                                  fmt(budget));
    worst_ratio = std::max(worst_ratio, dist / budget);
  }
  c.note("worst distance/budget ratio " + fmt(worst_ratio));
  return c;
}

// --------------------------------------------------------------------------
// 5. angle-estimator variance bound at M_q = 1000
// --------------------------------------------------------------------------
Check criterion_5() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  Rng base(505);
  const int shots = 1000;
  const int trials = 2500;
  double worst_ratio = 0.0;
  for (double phi = -0.65; phi <= 0.66; phi += 0.13) {
    if (std::abs(std::cos(2 * phi)) < 0.2) continue;  // Q singularities
    const PhaseProbabilities probs{0.5 * (1.0 + std::cos(2 * phi)),
                                   0.5 * (1.0 - std::sin(2 * phi))};
    std::vector<double> estimates;
    estimates.reserve(trials);
    Rng rng = base.substream(static_cast<std::uint64_t>(phi * 1000) + 999);
    for (int t = 0; t < trials; ++t)
      estimates.push_back(
          estimate_angle(sample_phase(probs, shots, rng)).phi_a);
    const double var = oracle::variance_of(estimates);
    const double bound = (3.0 + std::cos(8.0 * phi)) / (16.0 * shots);
    c.require(var <= 1.5 * bound, "phi " + fmt(phi) + ": var " + fmt(var) +
                                      " > 1.5 x " + fmt(bound));
    c.require(var <= 1.5 / (4.0 * shots),
              "phi " + fmt(phi) + ": var above the flat bound");
    worst_ratio = std::max(worst_ratio, var / bound);
  }
  const double elapsed = seconds_since(t0);
  c.require(elapsed < 60.0, "runtime " + fmt(elapsed) + " s");
  c.note("worst var/bound ratio " + fmt(worst_ratio) + ", " + fmt(elapsed) +
         " s");
  return c;
}

// --------------------------------------------------------------------------
// 6. ladder Heisenberg scaling and the per-level failure envelope
// --------------------------------------------------------------------------

// Failure frequency of a single level: angle error of the doubled angle
// at or beyond pi/2, over a uniform ensemble of true angles.
std::vector<double> level_failure_rates(const std::vector<int>& shot_counts,
                                        double delta, int trials,
                                        std::uint64_t seed) {
  std::vector<double> rates;
  for (int shots : shot_counts) {
    Rng rng(seed + static_cast<std::uint64_t>(shots));
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
      const double two_phi = rng.uniform(-kPi, kPi);
      PhaseProbabilities probs{0.5 * (1.0 + std::cos(two_phi)),
                               0.5 * (1.0 - std::sin(two_phi))};
      probs = apply_phase_noise(probs, 0.0, delta, delta);
      double xi_hat;
      try {
        xi_hat = estimate_angle(sample_phase(probs, shots, rng)).two_phi_a;
      } catch (const DegenerateSampleError&) {
        ++failures;
        continue;
      }
      if (std::abs(wrap_angle(xi_hat - two_phi)) >= kPi / 2.0) ++failures;
    }
    rates.push_back(static_cast<double>(failures) / trials);
  }
  return rates;
}

Check criterion_6() {
  Check c;
  // (a) log2 RMS vs d_L slope
  const double p_sum = 1.2345;
  std::vector<double> d_values, log_rms;
  for (int d = 4; d <= 8; ++d) {
    LadderSchedule schedule;
    schedule.eps0 = 0.1;
    schedule.d_l = d;
    schedule.alpha = 3;
    schedule.gamma = 3;
    Rng base(6000 + static_cast<std::uint64_t>(d));
    double acc = 0.0;
    int completed = 0;
    const int trials = 800;
    for (int t = 0; t < trials; ++t) {
      Rng rng = base.substream(static_cast<std::uint64_t>(t));
      try {
        const LadderResult res =
            ladder_estimate(injected_phase_model(p_sum), schedule, rng);
        acc += (res.p_sum_hat - p_sum) * (res.p_sum_hat - p_sum);
        ++completed;
      } catch (const LadderError&) {
        // exactly-balanced counts at a few shots; rate ~1e-4
      }
    }
    d_values.push_back(d);
    log_rms.push_back(std::log2(std::sqrt(acc / completed)));
  }
  const double slope = fit_slope(d_values, log_rms);
  c.require(std::abs(slope + 1.0) <= 0.15,
            "log2 RMS slope " + fmt(slope) + " outside -1 +- 0.15");

  // (b) per-level failure envelope fit at M = 3
  const std::vector<int> shot_counts{3, 4, 5, 6, 7, 8, 9, 10};
  const std::vector<double> rates =
      level_failure_rates(shot_counts, 0.0, 400000, 61000);
  const double c_fit = rates[0] / (std::pow(3.0, -0.5) * std::pow(2.0, -3.0));
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < shot_counts.size(); ++i) {
    const double envelope = c_fit * std::pow(shot_counts[i], -0.5) *
                            std::pow(2.0, -shot_counts[i]);
    c.require(rates[i] <= 2.0 * envelope,
              "M=" + std::to_string(shot_counts[i]) + ": rate " +
                  fmt(rates[i]) + " above 2 x " + fmt(envelope));
    worst_ratio = std::max(worst_ratio, rates[i] / envelope);
  }
  c.note("slope " + fmt(slope) + ", envelope c " + fmt(c_fit) +
         ", worst rate/envelope " + fmt(worst_ratio));
  return c;
}

// --------------------------------------------------------------------------
// 7. end-to-end CPS on random instances
// --------------------------------------------------------------------------
Check criterion_7() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  int hits = 0, total = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const Observable obs =
        random_observable(3, 5, 0.5, 7000 + static_cast<std::uint64_t>(inst));
    const PrepCircuit v =
        random_prep_circuit(3, 2, 7100 + static_cast<std::uint64_t>(inst));
    const StateVector psi = prepare(v, 3, false);
    const double exact = expectation_exact(obs, psi);
    Rng base(7200 + static_cast<std::uint64_t>(inst));
    for (int t = 0; t < 10; ++t) {
      Rng rng = base.substream(static_cast<std::uint64_t>(t));
      const CpsResult res = cps_estimate(obs, v, 0.01, CpsOptions{}, rng);
      ++total;
      if (std::abs(res.estimate - exact) <= 3.0 * res.final_halfwidth) ++hits;
    }
  }
  const double elapsed = seconds_since(t0);
  const double rate = static_cast<double>(hits) / total;
  c.require(rate >= 0.95, "hit rate " + fmt(rate));
  c.require(elapsed < 300.0, "runtime " + fmt(elapsed) + " s");
  c.note(std::to_string(hits) + "/" + std::to_string(total) +
         " within 3 half-widths, " + fmt(elapsed) + " s");
  return c;
}

// --------------------------------------------------------------------------
// 8. variance-ratio scaling at matched budget
// --------------------------------------------------------------------------
Check criterion_8() {
  Check c;
  ExperimentConfig config;
  config.gen_qubits = 3;
  config.gen_coeff_scale = 1.0;
  config.gen_seed = 808;
  config.eta = 0.01;
  config.trials = 200;
  config.seed = 808;
  const CompareRun run = run_compare(config, {2, 4, 8});
  double prev = 1e300;
  for (const CompareRow& row : run.rows) {
    c.require(row.ratio <= 2.0 * row.predicted_ratio &&
                  row.ratio >= 0.5 * row.predicted_ratio,
              "N=" + std::to_string(row.num_strings) + ": ratio " +
                  fmt(row.ratio) + " vs predicted " + fmt(row.predicted_ratio));
    c.require(row.ratio < prev,
              "N=" + std::to_string(row.num_strings) + ": ratio not decreasing");
    prev = row.ratio;
  }
  std::string detail = "ratios";
  for (const CompareRow& row : run.rows)
    detail += " N" + std::to_string(row.num_strings) + "=" + fmt(row.ratio) +
              " (pred " + fmt(row.predicted_ratio) + ")";
  c.note(detail);
  return c;
}

// --------------------------------------------------------------------------
// 9. reference budget numbers by exact formula evaluation
// --------------------------------------------------------------------------
Check criterion_9() {
  Check c;
  const ResourceEstimate cps_h3 = budget_cps(59, 4, 1.0);
  c.require(std::abs(cps_h3.state_preparations - 171.0) <= 1.0,
            "CPS H3+ T " + fmt(cps_h3.state_preparations));
  c.require(std::abs(cps_h3.p1_max - 4.9e-4) <= 0.05 * 4.9e-4,
            "CPS H3+ p1 " + fmt(cps_h3.p1_max));

  const ResourceEstimate cps_lih = budget_cps(630, 10, 1.0);
  c.require(std::abs(cps_lih.state_preparations - 2180.0) <= 2.0,
            "CPS LiH T " + fmt(cps_lih.state_preparations));
  c.require(std::abs(cps_lih.p1_max - 1.5e-5) <= 0.05 * 1.5e-5,
            "CPS LiH p1 " + fmt(cps_lih.p1_max));

  const ResourceEstimate qee_h3 = budget_qee(59, 4, 1.0);
  c.require(qee_h3.state_preparations == 3481.0,
            "QEE H3+ T " + fmt(qee_h3.state_preparations));
  c.require(std::abs(qee_h3.p1_max - 4.2e-3) <= 0.05 * 4.2e-3,
            "QEE H3+ p1 " + fmt(qee_h3.p1_max));

  const ResourceEstimate qee_lih = budget_qee(630, 10, 1.0);
  // The exact formula gives 1/6300 = 1.587e-4; the displayed two-figure
  // value truncates to 1.5e-4 (5.8% off), so the assert pins the formula
  // and the display gap is reported, mirroring the handling of the
  // displayed 3e5 vs the exact 396900 preparations.
  c.require(std::abs(qee_lih.p1_max - 1.0 / 6300.0) <= 1e-12,
            "QEE LiH p1 formula " + fmt(qee_lih.p1_max));
  c.require(qee_lih.state_preparations == 396900.0,
            "QEE LiH T " + fmt(qee_lih.state_preparations));
  c.note("QEE LiH p1 = " + fmt(qee_lih.p1_max) +
         " (displayed 1.5e-4 sits 5.8% below the formula); T = 396900 "
         "(displayed as 3e5)");
  return c;
}

// --------------------------------------------------------------------------
// 10. noise robustness
// --------------------------------------------------------------------------
Check criterion_10() {
  Check c;
  // depolarization bias at p = 0.01
  Rng rng(1010);
  const NoisyAngleBias bias = noisy_angle_bias(0.2, 0.01, 100000, rng);
  c.require(bias.within_bound,
            "Q bias " + fmt(bias.q_bias) + " above " + fmt(bias.bound));

  // Additive tomography error at sup-magnitude 0.3 < 1/sqrt(8). Instances
  // are drawn fresh per trial so the level-angle biases average out; the
  // schedule carries enough shots per level to resolve the offset-reduced
  // unwrap margins.
  auto slope_at = [&](double dx, double dy) {
    std::vector<double> d_values, log_rms;
    for (int d = 4; d <= 8; ++d) {
      LadderSchedule schedule;
      schedule.eps0 = 0.1;
      schedule.d_l = d;
      schedule.alpha = 50;
      schedule.gamma = 10;
      Rng base(9100 + static_cast<std::uint64_t>(d));
      double acc = 0.0;
      int completed = 0;
      const int trials = 1500;
      for (int t = 0; t < trials; ++t) {
        Rng sub = base.substream(static_cast<std::uint64_t>(t));
        const double p_sum = 0.5 + sub.uniform();
        const PhaseModel base_model = injected_phase_model(p_sum);
        const PhaseModel noisy = [base_model, dx, dy](double scale) {
          return apply_phase_noise(base_model(scale), 0.0, dx, dy);
        };
        try {
          const LadderResult res = ladder_estimate(noisy, schedule, sub);
          acc += (res.p_sum_hat - p_sum) * (res.p_sum_hat - p_sum);
          ++completed;
        } catch (const LadderError&) {
        }
      }
      d_values.push_back(d);
      log_rms.push_back(std::log2(std::sqrt(acc / completed)));
    }
    return fit_slope(d_values, log_rms);
  };
  const double slope03 = slope_at(0.3, 0.0);
  c.require(std::abs(slope03 + 1.0) <= 0.15,
            "sup-0.3 offset slope " + fmt(slope03));

  // Recorded, not asserted: equal-sign offsets on both bases sit at the
  // unwrap's bias-doubling boundary (3 asin(2 sqrt2 0.3) ~ pi) and plateau;
  // delta = 0.5 > 1/sqrt(8) fails deterministically at some angles.
  const double slope_both = slope_at(0.3, 0.3);
  const std::vector<double> rates05 =
      level_failure_rates({3, 5, 7}, 0.5, 40000, 10500);
  c.note("sup-0.3 slope " + fmt(slope03) + "; both-axes 0.3 slope " +
         fmt(slope_both) + " (recorded); delta 0.5 level-failure rates " +
         fmt(rates05[0]) + "/" + fmt(rates05[1]) + "/" + fmt(rates05[2]) +
         " (recorded, not asserted)");
  return c;
}

// --------------------------------------------------------------------------
// 11. byte-identical reruns at any worker count
// --------------------------------------------------------------------------
Check criterion_11() {
  Check c;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cps_acceptance";
  fs::create_directories(dir);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  ExperimentConfig config;
  config.gen_qubits = 3;
  config.gen_terms = 5;
  config.eta = 0.02;
  config.trials = 8;
  config.seed = 1111;
  config.method = "both";
  std::vector<std::string> csvs, jsons;
  for (int workers : {1, 2, 4}) {
    config.workers = workers;
    config.out_prefix =
        (dir / ("det_w" + std::to_string(workers))).string();
    const EstimateRun run = run_estimate(config);
    csvs.push_back(slurp(run.csv_path));
    jsons.push_back(slurp(run.json_path));
  }
  c.require(csvs[0] == csvs[1] && csvs[1] == csvs[2], "CSV outputs differ");
  c.require(jsons[0] == jsons[1] && jsons[1] == jsons[2],
            "JSON outputs differ");
  c.note("workers {1,2,4} byte-identical over " +
         std::to_string(config.trials) + " trials");
  return c;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<Check()> fn;
  };
  const std::vector<Entry> entries = {
      {1, "oracle equivalence of expectation_exact", criterion_1},
      {2, "principal angle vs U_Pj eigenvalues", criterion_2},
      {3, "QSP certification and tail bound", criterion_3},
      {4, "circuit/spectral backend agreement", criterion_4},
      {5, "angle-estimator variance bound", criterion_5},
      {6, "ladder Heisenberg scaling and failure envelope", criterion_6},
      {7, "end-to-end CPS within the final window", criterion_7},
      {8, "variance-ratio scaling at matched budget", criterion_8},
      {9, "reference budget values (formula evaluation)", criterion_9},
      {10, "noise robustness", criterion_10},
      {11, "deterministic outputs at any worker count", criterion_11},
  };
  int failures = 0;
  for (const Entry& entry : entries) {
    Check result;
    try {
      result = entry.fn();
    } catch (const std::exception& e) {
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    if (!result.pass) ++failures;
    std::printf("[%s] criterion %2d: %s%s%s\n", result.pass ? "PASS" : "FAIL",
                entry.id, entry.name, result.detail.empty() ? "" : " -- ",
                result.detail.c_str());
    std::fflush(stdout);
  }
  if (failures > 0)
    std::printf("%d criterion(s) failed\n", failures);
  else
    std::printf("all %zu criteria passed\n", entries.size());
  return failures == 0 ? 0 : 1;
}
