// Copyright 2026 The probft Authors.
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

// probft: bounds, message counts, Monte Carlo estimates and full protocol
// runs from a scenario file.

#include <iostream>

#include "CLI11.hpp"
#include "probft/cli.hpp"

namespace cli = probft::cli;

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic-quorum BFT toolkit"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint32_t> parallelism;

  auto add_common = [&](CLI::App* sub, bool needs_scenario) {
    auto* opt = sub->add_option("--scenario", scenario_path, "scenario file (YAML, schema v1)");
    if (needs_scenario) opt->required();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "override the scenario seed");
    sub->add_option("--trials", trials, "override experiment trials / run count");
    sub->add_option("--parallelism", parallelism, "worker threads");
  };

  auto* analyze = app.add_subcommand("analyze", "closed-form bounds over the grid -> bounds.csv");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiment -> estimates.csv");
  auto* run = app.add_subcommand("run", "protocol simulation -> trace.jsonl, metrics.csv, runs.csv");
  auto* msgcount = app.add_subcommand("msgcount", "message count comparison -> msgcount.csv");
  add_common(analyze, false);
  add_common(simulate, true);
  add_common(run, true);
  add_common(msgcount, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kExitValidation;
  }

  try {
    cli::Scenario sc;
    if (!scenario_path.empty()) sc = cli::load_scenario(scenario_path);
    cli::apply(sc, {seed, trials, parallelism});
    if (analyze->parsed()) return cli::cmd_analyze(sc, out_dir);
    if (simulate->parsed()) return cli::cmd_simulate(sc, out_dir);
    if (run->parsed()) return cli::cmd_run(sc, out_dir);
    return cli::cmd_msgcount(sc, out_dir);
  } catch (const probft::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
