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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cps/experiment.hpp"
#include "cps/resources.hpp"
#include "doctest.h"

using namespace cps;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CPS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "cps_cli_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("estimate run on the single-term Z instance") {
  const fs::path dir = temp_dir();
  const fs::path obs_path = dir / "z.txt";
  std::ofstream(obs_path) << "1.0 Z\n";
  const fs::path circ_path = dir / "id.txt";
  std::ofstream(circ_path) << "# identity\n";

  ExperimentConfig config;
  config.observable_file = obs_path.string();
  config.circuit_file = circ_path.string();
  config.eta = 0.05;
  config.trials = 3;
  config.seed = 9;
  config.out_prefix = (dir / "z_run").string();
  const EstimateRun run = run_estimate(config);
  CHECK(run.exact == doctest::Approx(1.0));
  CHECK(run.mean == doctest::Approx(1.0).epsilon(0.2));
  CHECK(fs::exists(run.json_path));
  CHECK(fs::exists(run.csv_path));
  const std::string json = slurp(run.json_path);
  CHECK(json.find("config_hash") != std::string::npos);
  CHECK(json.find("cps-sim") != std::string::npos);
}

TEST_CASE("same config and seed give byte-identical outputs at any worker count") {
  const fs::path dir = temp_dir();
  ExperimentConfig config;
  config.gen_qubits = 3;
  config.gen_terms = 4;
  config.eta = 0.05;
  config.trials = 6;
  config.seed = 31;
  config.method = "both";

  config.workers = 1;
  config.out_prefix = (dir / "run_a").string();
  run_estimate(config);
  config.workers = 2;
  config.out_prefix = (dir / "run_b").string();
  run_estimate(config);
  config.workers = 3;
  config.out_prefix = (dir / "run_c").string();
  run_estimate(config);

  const std::string csv_a = slurp(dir / "run_a.csv");
  CHECK(csv_a == slurp(dir / "run_b.csv"));
  CHECK(csv_a == slurp(dir / "run_c.csv"));
  // JSON bodies differ only in nothing: strip nothing, compare fully
  CHECK(slurp(dir / "run_a.json") == slurp(dir / "run_b.json"));
}

TEST_CASE("compare run produces the sweep table") {
  ExperimentConfig config;
  config.gen_qubits = 3;
  config.eta = 0.25;
  config.trials = 40;
  config.seed = 5;
  const CompareRun run = run_compare(config, {2, 4});
  REQUIRE(run.rows.size() == 2);
  CHECK(run.rows[0].num_strings == 2);
  CHECK(run.rows[1].num_strings == 4);
  CHECK(run.rows[0].predicted_ratio ==
        doctest::Approx(variance_ratio(2, 0.25)));
  CHECK(run.rows[0].budget > 0);
  CHECK_THROWS_AS(run_compare(config, {}), UsageError);
}

TEST_CASE("missing files are usage errors") {
  ExperimentConfig config;
  config.observable_file = "/nonexistent/obs.txt";
  CHECK_THROWS_AS(run_estimate(config), UsageError);
  config.observable_file.clear();
  config.circuit_file = "/nonexistent/circ.txt";
  CHECK_THROWS_AS(run_estimate(config), UsageError);
}

TEST_CASE("config validation") {
  ExperimentConfig config;
  config.method = "banana";
  CHECK_THROWS_AS(run_estimate(config), UsageError);
  config.method = "cps";
  config.trials = 0;
  CHECK_THROWS_AS(run_estimate(config), UsageError);
}

TEST_CASE("cli exit codes") {
  const fs::path dir = temp_dir();
  const fs::path obs_path = dir / "cli_z.txt";
  std::ofstream(obs_path) << "1.0 Z\n";
  const fs::path circ_path = dir / "cli_id.txt";
  std::ofstream(circ_path) << "# identity\n";

  CHECK(run_cli("estimate --observable " + obs_path.string() + " --circuit " +
                circ_path.string() + " --eta 0.1 --trials 2 --seed 4") == 0);
  // missing observable file -> usage/config error
  CHECK(run_cli("estimate --observable /nope.txt") == 2);
  // unknown method -> usage error
  CHECK(run_cli("estimate --observable " + obs_path.string() +
                " --method banana") == 2);
  // unknown flag -> parse error
  CHECK(run_cli("estimate --frobnicate") == 2);
  // bad budget method string
  CHECK(run_cli("budget --method banana") == 2);
  // synth wants eps > 0
  CHECK(run_cli("synth --tau 0.5 --eps 0") == 2);
  // runtime success paths
  CHECK(run_cli("budget -N 59 -n 4 --eta 1 --method cps") == 0);
  CHECK(run_cli("gen-observable --qubits 2 --terms 3 --out " +
                (dir / "gen.txt").string()) == 0);
  CHECK(fs::exists(dir / "gen.txt"));
}

TEST_CASE("cli config file with flag overrides") {
  const fs::path dir = temp_dir();
  const fs::path cfg = dir / "exp.ini";
  std::ofstream(cfg) << "[estimate]\ngen-qubits = 2\ngen-terms = 3\n"
                     << "eta = 0.1\ntrials = 2\nseed = 12\n";
  const fs::path out_a = dir / "cfg_a";
  const fs::path out_b = dir / "cfg_b";
  CHECK(run_cli("estimate --config " + cfg.string() + " --out " +
                out_a.string()) == 0);
  // the same settings spelled as flags give identical bytes
  CHECK(run_cli("estimate --gen-qubits 2 --gen-terms 3 --eta 0.1 --trials 2 "
                "--seed 12 --out " + out_b.string()) == 0);
  CHECK(slurp(fs::path(out_a.string() + ".csv")) ==
        slurp(fs::path(out_b.string() + ".csv")));
  // missing config file is a usage error
  CHECK(run_cli("estimate --config /nonexistent.ini") == 2);
}

TEST_CASE("budget and synth outputs carry provenance") {
  const fs::path dir = temp_dir();
  const fs::path budget_out = dir / "budget.json";
  CHECK(run_cli("budget -N 59 -n 4 --eta 1 --method cps --out " +
                budget_out.string()) == 0);
  const std::string budget_json = slurp(budget_out);
  CHECK(budget_json.find("version") != std::string::npos);
  CHECK(budget_json.find("config_hash") != std::string::npos);
  const fs::path plan_out = dir / "plan.json";
  CHECK(run_cli("synth --tau 0.3 --eps 1e-2 --out " + plan_out.string()) == 0);
  const std::string plan_json = slurp(plan_out);
  CHECK(plan_json.find("eps_certified") != std::string::npos);
  CHECK(plan_json.find("config_hash") != std::string::npos);
}

TEST_CASE("cli byte-identical reruns") {
  const fs::path dir = temp_dir();
  const std::string base =
      "estimate --gen-qubits 3 --gen-terms 4 --eta 0.1 --trials 4 --seed 77 --out ";
  CHECK(run_cli(base + (dir / "det_a").string()) == 0);
  CHECK(run_cli(base + (dir / "det_b").string() + " --workers 2") == 0);
  CHECK(slurp(dir / "det_a.csv") == slurp(dir / "det_b.csv"));
}
