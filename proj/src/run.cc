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

#include "vicomp/run.h"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace vicomp {

std::string to_string(RunStatus status) {
  return status == RunStatus::kOk ? "ok" : "diverged";
}

namespace {

MetricSample take_sample(const VIProblem& problem, const RunState& state,
                         const Network& net, const AlgoConfig& cfg,
                         const MetricOptions& metrics, const Vector& half_sum,
                         bool gap_now) {
  MetricSample s;
  s.iter = state.k;
  s.cum_bits_up = net.ledger().uplink_payload_bits();
  s.cum_bits_down = net.ledger().downlink_payload_bits();
  s.full_syncs = net.ledger().full_sync_events();
  const bool anchored = is_anchored(cfg.algorithm);
  if (metrics.distance && problem.solution()) {
    s.dist_sq = dist_sq(state.z(), *problem.solution());
    if (anchored) s.dist_sq_w = dist_sq(state.w(), *problem.solution());
  }
  if (metrics.op_norm) {
    s.op_norm_sq = op_norm_sq(problem, anchored ? state.w() : state.z());
  }
  if (metrics.gap && gap_now && state.k > 0) {
    const Vector average = half_sum / static_cast<double>(state.k);
    s.gap_est = gap_estimate(problem, average, metrics.gap_options);
  }
  return s;
}

}  // namespace

RunReport run(const VIProblem& problem, const AlgoConfig& cfg, Network& net,
              const Vector& z0, const MetricOptions& metrics,
              const StepObserver& observer) {
  RunReport report;
  report.algorithm = cfg.algorithm;
  RunState state = init_state(problem, net, cfg, z0);
  Vector half_sum = Vector::Zero(problem.dim());
  report.samples.push_back(
      take_sample(problem, state, net, cfg, metrics, half_sum, false));

  StepTrace trace;
  for (std::size_t k = 0; k < cfg.iterations; ++k) {
    step(state, problem, net, cfg, observer ? &trace : nullptr);
    if (observer) observer(state, trace);
    half_sum += state.last_half;
    const double norm = state.z().norm();
    if (!state.z().allFinite() || !std::isfinite(norm) || norm > kDivergenceNorm) {
      report.status = RunStatus::kDiverged;
      report.diagnostic = "iterate norm " + format_number(norm) +
                          " exceeded the divergence threshold at iteration " +
                          std::to_string(state.k);
      MetricSample s;
      s.iter = state.k;
      s.cum_bits_up = net.ledger().uplink_payload_bits();
      s.cum_bits_down = net.ledger().downlink_payload_bits();
      s.full_syncs = net.ledger().full_sync_events();
      report.samples.push_back(s);
      break;
    }
    const bool budget_spent =
        cfg.uplink_budget_bits > 0 &&
        net.ledger().uplink_payload_bits() >= cfg.uplink_budget_bits;
    const bool last = k + 1 == cfg.iterations || budget_spent;
    if ((k + 1) % cfg.metric_every == 0 || last) {
      const bool gap_now =
          last || (metrics.gap_every > 0 && (k + 1) % metrics.gap_every == 0);
      report.samples.push_back(
          take_sample(problem, state, net, cfg, metrics, half_sum, gap_now));
    }
    if (budget_spent) break;
  }
  report.iterations_done = state.k;
  report.final_z = state.z();
  report.final_w = state.w();
  report.average_half = state.k > 0
                            ? Vector(half_sum / static_cast<double>(state.k))
                            : z0;
  return report;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_report_csv(std::ostream& out,
                      const std::vector<MetricSample>& samples) {
  out << kReportCsvHeader << '\n';
  for (const MetricSample& s : samples) {
    out << s.iter << ',' << s.cum_bits_up << ',' << s.cum_bits_down << ','
        << format_number(s.dist_sq) << ',' << format_number(s.gap_est) << ','
        << format_number(s.op_norm_sq) << ',' << s.full_syncs << '\n';
  }
}

}  // namespace vicomp
