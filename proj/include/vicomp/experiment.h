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

#ifndef VICOMP_EXPERIMENT_H_
#define VICOMP_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vicomp/algorithms.h"
#include "vicomp/compressor.h"
#include "vicomp/metrics.h"
#include "vicomp/problem.h"
#include "vicomp/run.h"

namespace vicomp {

// Invalid configuration; the message carries "line L, column C" when the
// problem can be located in the file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemConfig {
  std::string kind = "bilinear";  // bilinear | bilinear_file | rotation
  std::size_t d = 100;            // bilinear half dimension
  std::size_t nodes = 16;
  std::uint64_t seed = 1;
  LambdaMode lambda = LambdaMode::paper_rule();
  std::size_t r = 1;              // row-block components per node
  std::string path;               // bilinear_file
  std::size_t pairs = 1;          // rotation planes
  double eps = 1e-3;              // rotation monotone part
  double heterogeneity = 0.0;
  std::vector<double> center;     // rotation solution, zero if empty
};

struct AlgorithmEntry {
  Algorithm algorithm = Algorithm::kMasha1;
  std::string label;
  std::string compressor = "identity";
  std::string server_compressor = "identity";
  std::optional<double> gamma;  // empty: theory bound times safety
  double safety = 1.0;
  std::optional<double> tau;    // empty: optimal rule
  std::size_t participants = 0;
  WUpdate w_update = WUpdate::kCurrentIterate;
};

// Starting point z^0 = w^0 of every run: the origin, or a standard normal
// draw fixed by the problem seed (shared by all algorithms and run seeds).
enum class InitialPoint { kZero, kNormal };

struct ExperimentConfig {
  ProblemConfig problem;
  std::vector<AlgorithmEntry> algorithms;
  std::size_t iterations = 1000;
  std::size_t metric_every = 1;
  std::size_t seeds = 1;
  std::uint64_t base_seed = 0;
  std::uint64_t budget_bits = 0;  // 0: no uplink budget
  bool gap = false;
  std::size_t gap_every = 0;
  GapOptions gap_options;
  bool ledger_csv = false;
  InitialPoint initial_point = InitialPoint::kZero;
  std::vector<double> sweep_grid;   // absolute step sizes
  std::vector<double> sweep_scale;  // multiples of the theory step size
};

ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);

VIProblem build_problem(const ProblemConfig& config);
Vector make_initial_point(const ExperimentConfig& config, const VIProblem& problem);

// Fully resolved run parameters for one algorithm entry.
struct ResolvedRun {
  AlgoConfig algo;
  CompressorSpec device;
  CompressorSpec server;
  std::string label;
};

ResolvedRun resolve(const AlgorithmEntry& entry, const VIProblem& problem,
                    const ExperimentConfig& config, std::uint64_t seed);

// One seeded run of a resolved entry on a fresh network.
RunReport execute(const VIProblem& problem, const ResolvedRun& run,
                  const ExperimentConfig& config, CommLedger* ledger = nullptr);

// Sample-wise mean over seeds; rows missing from any seed become NaN.
std::vector<MetricSample> mean_samples(
    const std::vector<std::vector<MetricSample>>& per_seed);

// Each command writes into `out_dir` (created if needed) and returns the
// process exit code. Progress goes to `log`.
int cmd_run(const ExperimentConfig& config, const std::string& out_dir,
            std::ostream& log);
int cmd_sweep(const ExperimentConfig& config, const std::string& out_dir,
              std::ostream& log);
int cmd_check_stepsize(const ExperimentConfig& config, std::ostream& out);

// Defaults of the five-method comparison preset.
inline constexpr std::uint64_t kFigure1BudgetBits = 64'000'000;
inline constexpr std::size_t kFigure1MaxIterations = 100'000;
inline constexpr std::size_t kFigure1MetricEvery = 20;

struct CompareOptions {
  std::size_t d = 100;
  std::size_t nodes = 16;
  std::uint64_t problem_seed = 1;
  std::size_t seeds = 5;
  std::uint64_t budget_bits = 0;  // 0: preset default
  std::size_t max_iterations = 0; // 0: preset default
  std::size_t metric_every = 0;   // 0: preset default
  int grid_low = -10;             // grid exponents of 2 around the anchor
  int grid_high = 0;
};

struct CompareSeries {
  std::string label;
  Algorithm algorithm = Algorithm::kMasha1;
  std::string compressor;
  double gamma = 0.0;
  double tau = 0.0;
  std::vector<double> final_dist_sq;  // per seed at the budget
  double median_final = 0.0;
  std::vector<std::vector<MetricSample>> samples;
};

struct CompareGridPoint {
  std::string label;
  double gamma = 0.0;
  double median_final = 0.0;
};

struct CompareResult {
  double anchor = 0.0;
  std::vector<CompareGridPoint> grid;
  std::uint64_t budget_bits = 0;
  std::vector<CompareSeries> series;
};

ExperimentConfig figure1_config(const CompareOptions& options);
CompareResult run_compare(const CompareOptions& options, std::ostream& log);
int cmd_compare(const CompareOptions& options, const std::string& out_dir,
                std::ostream& log);

}  // namespace vicomp

#endif  // VICOMP_EXPERIMENT_H_
