// Copyright 2026 The vicomp Authors. All Rights Reserved.
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
// =============================================================================

// Command-line runner for single runs, step-size sweeps, the five-method
// comparison preset and theory checks.

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>

#include "vicomp/experiment.h"

namespace {

constexpr int kConfigError = 1;
constexpr int kInternalError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed distributed variational inequality solvers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::size_t seeds = 0;
  std::string preset = "figure1";
  vicomp::CompareOptions compare;

  auto* run = app.add_subcommand("run", "run every configured algorithm");
  run->add_option("--config", config_path, "YAML experiment file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seeds", seeds, "number of seeds (overrides the config)");

  auto* sweep = app.add_subcommand("sweep", "rank step sizes on a grid");
  sweep->add_option("--config", config_path, "YAML experiment file")->required();
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--seeds", seeds, "number of seeds (overrides the config)");

  auto* check = app.add_subcommand("check-stepsize", "print theory step-size bounds");
  check->add_option("--config", config_path, "YAML experiment file")->required();

  auto* cmp = app.add_subcommand("compare", "five-method comparison on the bilinear game");
  cmp->add_option("--preset", preset, "comparison preset")->check(CLI::IsMember({"figure1"}));
  cmp->add_option("--out", out_dir, "output directory");
  cmp->add_option("--seeds", compare.seeds, "seeds per step size");
  cmp->add_option("--d", compare.d, "half dimension of the bilinear game");
  cmp->add_option("--nodes", compare.nodes, "number of devices");
  cmp->add_option("--problem-seed", compare.problem_seed, "instance seed");
  cmp->add_option("--budget-bits", compare.budget_bits, "uplink payload budget per run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*cmp) return vicomp::cmd_compare(compare, out_dir, std::cout);
    vicomp::ExperimentConfig config = vicomp::load_config(config_path);
    if (seeds > 0) config.seeds = seeds;
    if (*run) return vicomp::cmd_run(config, out_dir, std::cout);
    if (*sweep) return vicomp::cmd_sweep(config, out_dir, std::cout);
    return vicomp::cmd_check_stepsize(config, std::cout);
  } catch (const vicomp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternalError;
  }
}
