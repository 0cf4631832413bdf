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

#ifndef VICOMP_ALGORITHMS_H_
#define VICOMP_ALGORITHMS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vicomp/linalg.h"
#include "vicomp/problem.h"
#include "vicomp/simnet.h"

namespace vicomp {

enum class Algorithm {
  kMasha1,
  kMasha2,
  kVrMasha1,
  kVrMasha2,
  kPpMasha1,
  kPpMasha2,
  kExtragradient,
  kCeg,
  kQsgdGda,
  kEfGda,
};

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& name);

// Methods built on the reference point w and its occasional full exchange.
bool is_anchored(Algorithm algorithm);
// Methods that keep per-device compression residuals.
bool uses_error_feedback(Algorithm algorithm);
bool samples_components(Algorithm algorithm);
bool samples_participants(Algorithm algorithm);

// Where w moves on a full synchronization: the iterate before the step
// (z^k) or the one it produced (z^{k+1}).
enum class WUpdate { kCurrentIterate, kNextIterate };

std::string to_string(WUpdate mode);
WUpdate parse_w_update(const std::string& name);

struct AlgoConfig {
  Algorithm algorithm = Algorithm::kMasha1;
  double gamma = 0.0;
  double tau = 0.5;
  std::size_t iterations = 0;
  std::size_t participants = 0;  // PP only; 0 means all devices
  std::uint64_t seed = 0;
  std::size_t metric_every = 1;
  WUpdate w_update = WUpdate::kCurrentIterate;
  // Stop early once the cumulative uplink payload reaches this; 0 disables.
  std::uint64_t uplink_budget_bits = 0;

  void validate(std::size_t devices) const;
};

// What one device holds. Every device keeps its own copy of the shared
// quantities so that replication can be audited.
struct DeviceState {
  Vector z;
  Vector w;
  Vector Fw;    // F(w), as received from the server
  Vector Fm_w;  // F_m(w), local
  Vector e;     // compression residual, error-feedback methods only
};

struct RunState {
  std::uint64_t k = 0;
  std::vector<DeviceState> devices;
  Vector server_e;
  Vector last_half;  // z^{k-1/2} produced by the latest step
  std::vector<std::size_t> last_components;
  std::vector<std::size_t> last_participants;

  const Vector& z() const { return devices.front().z; }
  const Vector& w() const { return devices.front().w; }
  const Vector& Fw() const { return devices.front().Fw; }
};

// z^0 = w^0 on every device, zero residuals; anchored methods perform the
// initial uncompressed exchange of F(w^0), booked as ledger record 0.
RunState init_state(const VIProblem& problem, Network& net,
                    const AlgoConfig& cfg, const Vector& z0);

// Intermediate quantities of one step, recorded for diagnostics and tests.
struct StepTrace {
  Vector z;
  Vector w;
  Vector z_half;
  std::vector<std::size_t> senders;
  std::vector<Vector> delta;         // per sender, before scaling by gamma
  std::vector<Vector> device_input;  // per sender, handed to the compressor
  std::vector<Vector> device_sent;   // per sender, as decoded by the server
  std::vector<Vector> e_before;      // every device
  std::vector<Vector> e_after;
  Vector server_input;
  Vector server_sent;
  Vector server_e_before;
  Vector server_e_after;
  bool full_sync = false;
};

void step(RunState& state, const VIProblem& problem, Network& net,
          const AlgoConfig& cfg, StepTrace* trace = nullptr);

// Largest absolute deviation of any device copy of z, w, F(w) from device 0.
double replication_gap(const RunState& state);

// z - e - (1/divisor) sum_m e_m.
Vector hat_point(const Vector& z, const Vector& server_e,
                 const std::vector<Vector>& device_e, double divisor);

}  // namespace vicomp

#endif  // VICOMP_ALGORITHMS_H_
