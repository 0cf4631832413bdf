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

#ifndef VICOMP_RUN_H_
#define VICOMP_RUN_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "vicomp/algorithms.h"
#include "vicomp/metrics.h"
#include "vicomp/problem.h"
#include "vicomp/simnet.h"

namespace vicomp {

inline constexpr double kDivergenceNorm = 1e12;

struct MetricSample {
  static constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

  std::uint64_t iter = 0;
  std::uint64_t cum_bits_up = 0;
  std::uint64_t cum_bits_down = 0;
  double dist_sq = kMissing;
  double dist_sq_w = kMissing;
  double gap_est = kMissing;
  double op_norm_sq = kMissing;
  std::uint64_t full_syncs = 0;
};

struct MetricOptions {
  bool distance = true;   // needs a known solution
  bool op_norm = true;    // ||F(w)||^2, or ||F(z)|| for methods without w
  bool gap = false;       // gap of the running average of z^{k+1/2}
  std::size_t gap_every = 0;  // 0: only at the last sample
  GapOptions gap_options;
};

enum class RunStatus { kOk, kDiverged };

std::string to_string(RunStatus status);

struct RunReport {
  Algorithm algorithm = Algorithm::kMasha1;
  RunStatus status = RunStatus::kOk;
  std::string diagnostic;
  std::uint64_t iterations_done = 0;
  std::vector<MetricSample> samples;
  Vector final_z;
  Vector final_w;
  Vector average_half;  // (1/K) sum_k z^{k+1/2}
};

// Callback run after every step, e.g. for audits. Receiving the trace makes
// the step record it.
using StepObserver = std::function<void(const RunState&, const StepTrace&)>;

RunReport run(const VIProblem& problem, const AlgoConfig& cfg, Network& net,
              const Vector& z0, const MetricOptions& metrics = {},
              const StepObserver& observer = {});

inline constexpr const char* kReportCsvHeader =
    "iter,cum_bits_up,cum_bits_down,dist_sq,gap_est,op_norm_sq,full_sync";

void write_report_csv(std::ostream& out,
                      const std::vector<MetricSample>& samples);
std::string format_number(double value);

}  // namespace vicomp

#endif  // VICOMP_RUN_H_
