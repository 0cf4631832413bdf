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

#include "vicomp/algorithms.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "vicomp/compressor.h"
#include "vicomp/rng.h"

namespace vicomp {

namespace {

struct Names {
  Algorithm algorithm;
  const char* name;
};

constexpr Names kNames[] = {
    {Algorithm::kMasha1, "masha1"},
    {Algorithm::kMasha2, "masha2"},
    {Algorithm::kVrMasha1, "vr_masha1"},
    {Algorithm::kVrMasha2, "vr_masha2"},
    {Algorithm::kPpMasha1, "pp_masha1"},
    {Algorithm::kPpMasha2, "pp_masha2"},
    {Algorithm::kExtragradient, "extragradient"},
    {Algorithm::kCeg, "ceg"},
    {Algorithm::kQsgdGda, "qsgd_gda"},
    {Algorithm::kEfGda, "ef_gda"},
};

// Phases separate the independent compressions inside one iteration.
constexpr std::uint64_t kFirstHalf = 0;
constexpr std::uint64_t kSecondHalf = 1;

std::vector<std::size_t> all_devices(std::size_t M) {
  std::vector<std::size_t> out(M);
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

// Full synchronization: every device moves w, recomputes F_m(w), and the
// server returns the uncompressed average.
void full_sync(RunState& state, const VIProblem& problem, Network& net,
               const std::vector<Vector>& new_w) {
  const std::size_t M = state.devices.size();
  Vector sum;
  for (std::size_t m = 0; m < M; ++m) {
    DeviceState& dev = state.devices[m];
    dev.w = new_w[m];
    problem.eval_operator(m, dev.w, dev.Fm_w);
    Vector received = net.uplink_full(m, dev.Fm_w);
    if (m == 0) {
      sum = std::move(received);
    } else {
      sum += received;
    }
  }
  sum /= static_cast<double>(M);
  const Vector Fw = net.broadcast_full(sum);
  for (DeviceState& dev : state.devices) dev.Fw = Fw;
  net.ledger().mark_full_sync();
}

void anchored_step(RunState& state, const VIProblem& problem, Network& net,
                   const AlgoConfig& cfg, StepTrace* trace) {
  const std::size_t M = state.devices.size();
  const std::uint64_t k = state.k;
  const bool feedback = uses_error_feedback(cfg.algorithm);
  const double gamma = cfg.gamma;
  const double tau = cfg.tau;

  std::vector<Vector> half(M);
  for (std::size_t m = 0; m < M; ++m) {
    const DeviceState& dev = state.devices[m];
    half[m] = tau * dev.z + (1.0 - tau) * dev.w - gamma * dev.Fw;
  }

  std::vector<std::size_t> senders;
  if (samples_participants(cfg.algorithm)) {
    senders = net.sample_participants(cfg.participants == 0 ? M : cfg.participants);
  } else {
    senders = all_devices(M);
  }
  if (trace) {
    *trace = {};
    trace->z = state.z();
    trace->w = state.w();
    trace->z_half = half.front();
    trace->senders = senders;
    for (const DeviceState& dev : state.devices) trace->e_before.push_back(dev.e);
    trace->server_e_before = state.server_e;
  }

  const std::size_t r = problem.components_per_node();
  state.last_components.assign(M, 0);
  Vector sum;
  Vector at_half;
  Vector at_w;
  for (std::size_t j = 0; j < senders.size(); ++j) {
    const std::size_t m = senders[j];
    DeviceState& dev = state.devices[m];
    Vector delta;
    if (samples_components(cfg.algorithm)) {
      Rng pick = make_stream(net.seed(), Stream::kComponent, {m, k});
      const std::size_t i = uniform_below(pick, r);
      state.last_components[m] = i;
      problem.eval_component(m, i, half[m], at_half);
      problem.eval_component(m, i, dev.w, at_w);
      delta = at_half - at_w;
    } else {
      problem.eval_operator(m, half[m], at_half);
      delta = at_half - dev.Fm_w;
    }
    Rng rng = net.device_stream(m, k, kFirstHalf);
    Vector input = feedback ? Vector(gamma * delta + dev.e) : delta;
    const CompressedMessage msg = compress(net.device_spec(m), input, rng);
    Vector received = net.uplink(m, msg);
    if (feedback) dev.e = input - received;
    if (trace) {
      trace->delta.push_back(delta);
      trace->device_input.push_back(input);
      trace->device_sent.push_back(received);
    }
    if (j == 0) {
      sum = std::move(received);
    } else {
      sum += received;
    }
  }
  sum /= static_cast<double>(senders.size());

  Vector server_input = feedback ? Vector(sum + state.server_e) : sum;
  Rng server_rng = net.server_stream(k, kFirstHalf);
  const CompressedMessage out = compress(net.server_spec(), server_input, server_rng);
  const Vector g = net.broadcast(out);
  if (feedback) state.server_e = server_input - g;
  if (trace) {
    trace->server_input = server_input;
    trace->server_sent = g;
    trace->server_e_after = state.server_e;
  }

  std::vector<Vector> next(M);
  for (std::size_t m = 0; m < M; ++m) {
    next[m] = feedback ? Vector(half[m] - g) : Vector(half[m] - gamma * g);
  }

  const bool sync = net.shared_coin(1.0 - tau);
  if (sync) {
    std::vector<Vector> new_w(M);
    for (std::size_t m = 0; m < M; ++m) {
      new_w[m] = cfg.w_update == WUpdate::kCurrentIterate ? state.devices[m].z
                                                           : next[m];
    }
    full_sync(state, problem, net, new_w);
  }
  for (std::size_t m = 0; m < M; ++m) state.devices[m].z = std::move(next[m]);
  state.last_half = std::move(half.front());
  state.last_participants = std::move(senders);
  if (trace) {
    trace->full_sync = sync;
    for (const DeviceState& dev : state.devices) trace->e_after.push_back(dev.e);
  }
}

// One averaged exchange of F_m at the devices' copies of `points`.
// Uncompressed when `compressed` is false, otherwise each device applies
// its compressor with a fresh stream for the given phase.
Vector exchange(const VIProblem& problem, Network& net,
                const std::vector<Vector>& points, bool compressed,
                std::uint64_t k, std::uint64_t phase) {
  const std::size_t M = points.size();
  Vector sum;
  Vector Fm;
  for (std::size_t m = 0; m < M; ++m) {
    problem.eval_operator(m, points[m], Fm);
    Vector received;
    if (compressed) {
      Rng rng = net.device_stream(m, k, phase);
      received = net.uplink(m, compress(net.device_spec(m), Fm, rng));
    } else {
      received = net.uplink_full(m, Fm);
    }
    if (m == 0) {
      sum = std::move(received);
    } else {
      sum += received;
    }
  }
  sum /= static_cast<double>(M);
  return net.broadcast_full(sum);
}

void extragradient_step(RunState& state, const VIProblem& problem,
                        Network& net, const AlgoConfig& cfg, bool compressed,
                        StepTrace* trace) {
  const std::size_t M = state.devices.size();
  const double gamma = cfg.gamma;
  std::vector<Vector> points(M);
  for (std::size_t m = 0; m < M; ++m) points[m] = state.devices[m].z;
  const Vector g1 = exchange(problem, net, points, compressed, state.k, kFirstHalf);
  std::vector<Vector> half(M);
  for (std::size_t m = 0; m < M; ++m) half[m] = state.devices[m].z - gamma * g1;
  const Vector g2 = exchange(problem, net, half, compressed, state.k, kSecondHalf);
  if (trace) {
    *trace = {};
    trace->z = state.z();
    trace->w = state.w();
    trace->z_half = half.front();
  }
  for (std::size_t m = 0; m < M; ++m) state.devices[m].z -= gamma * g2;
  state.last_half = std::move(half.front());
}

void descent_ascent_step(RunState& state, const VIProblem& problem,
                         Network& net, const AlgoConfig& cfg,
                         StepTrace* trace) {
  const std::size_t M = state.devices.size();
  const bool feedback = cfg.algorithm == Algorithm::kEfGda;
  const double gamma = cfg.gamma;
  if (trace) {
    *trace = {};
    trace->z = state.z();
    trace->w = state.w();
    trace->z_half = state.z();
    trace->senders = all_devices(M);
    for (const DeviceState& dev : state.devices) trace->e_before.push_back(dev.e);
  }
  Vector sum;
  Vector Fm;
  for (std::size_t m = 0; m < M; ++m) {
    DeviceState& dev = state.devices[m];
    problem.eval_operator(m, dev.z, Fm);
    Rng rng = net.device_stream(m, state.k, kFirstHalf);
    Vector input = feedback ? Vector(gamma * Fm + dev.e) : Fm;
    Vector received = net.uplink(m, compress(net.device_spec(m), input, rng));
    if (feedback) dev.e = input - received;
    if (trace) {
      trace->delta.push_back(Fm);
      trace->device_input.push_back(input);
      trace->device_sent.push_back(received);
    }
    if (m == 0) {
      sum = std::move(received);
    } else {
      sum += received;
    }
  }
  sum /= static_cast<double>(M);
  const Vector g = net.broadcast_full(sum);
  state.last_half = state.z();
  for (DeviceState& dev : state.devices) {
    if (feedback) {
      dev.z -= g;
    } else {
      dev.z -= gamma * g;
    }
  }
  if (trace) {
    for (const DeviceState& dev : state.devices) trace->e_after.push_back(dev.e);
  }
}

}  // namespace

std::string to_string(Algorithm algorithm) {
  for (const auto& n : kNames) {
    if (n.algorithm == algorithm) return n.name;
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::tolower(c));
  });
  if (key == "eg") return Algorithm::kExtragradient;
  if (key == "qsgd" || key == "qgd") return Algorithm::kQsgdGda;
  if (key == "ef") return Algorithm::kEfGda;
  for (const auto& n : kNames) {
    if (key == n.name) return n.algorithm;
  }
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

bool is_anchored(Algorithm a) {
  switch (a) {
    case Algorithm::kMasha1:
    case Algorithm::kMasha2:
    case Algorithm::kVrMasha1:
    case Algorithm::kVrMasha2:
    case Algorithm::kPpMasha1:
    case Algorithm::kPpMasha2:
      return true;
    default:
      return false;
  }
}

bool uses_error_feedback(Algorithm a) {
  return a == Algorithm::kMasha2 || a == Algorithm::kVrMasha2 ||
         a == Algorithm::kPpMasha2 || a == Algorithm::kEfGda;
}

bool samples_components(Algorithm a) {
  return a == Algorithm::kVrMasha1 || a == Algorithm::kVrMasha2;
}

bool samples_participants(Algorithm a) {
  return a == Algorithm::kPpMasha1 || a == Algorithm::kPpMasha2;
}

std::string to_string(WUpdate mode) {
  return mode == WUpdate::kCurrentIterate ? "z_k" : "z_k_plus_1";
}

WUpdate parse_w_update(const std::string& name) {
  if (name == "z_k") return WUpdate::kCurrentIterate;
  if (name == "z_k_plus_1") return WUpdate::kNextIterate;
  throw std::invalid_argument("w_update must be z_k or z_k_plus_1, got '" +
                              name + "'");
}

void AlgoConfig::validate(std::size_t devices) const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("gamma must be positive and finite");
  }
  if (is_anchored(algorithm) && !(tau > 0.0 && tau < 1.0)) {
    throw std::invalid_argument("tau must lie in (0, 1)");
  }
  if (samples_participants(algorithm) && participants > devices) {
    throw std::invalid_argument("participants must satisfy 1 <= b <= M");
  }
  if (metric_every == 0) throw std::invalid_argument("metric_every must be >= 1");
}

RunState init_state(const VIProblem& problem, Network& net,
                    const AlgoConfig& cfg, const Vector& z0) {
  const std::size_t M = problem.nodes();
  if (net.devices() != M) {
    throw std::invalid_argument("network and problem disagree on M");
  }
  if (static_cast<std::size_t>(z0.size()) != problem.dim()) {
    throw std::invalid_argument("initial point has wrong dimension");
  }
  cfg.validate(M);
  RunState state;
  state.devices.resize(M);
  const bool feedback = uses_error_feedback(cfg.algorithm);
  for (DeviceState& dev : state.devices) {
    dev.z = z0;
    dev.w = z0;
    if (feedback) dev.e = Vector::Zero(z0.size());
  }
  if (feedback) state.server_e = Vector::Zero(z0.size());
  state.last_half = z0;
  net.ledger().open_record(0);
  if (is_anchored(cfg.algorithm)) {
    Vector sum;
    for (std::size_t m = 0; m < M; ++m) {
      DeviceState& dev = state.devices[m];
      problem.eval_operator(m, dev.w, dev.Fm_w);
      Vector received = net.uplink_full(m, dev.Fm_w);
      if (m == 0) {
        sum = std::move(received);
      } else {
        sum += received;
      }
    }
    sum /= static_cast<double>(M);
    const Vector Fw = net.broadcast_full(sum);
    for (DeviceState& dev : state.devices) dev.Fw = Fw;
  }
  return state;
}

void step(RunState& state, const VIProblem& problem, Network& net,
          const AlgoConfig& cfg, StepTrace* trace) {
  net.ledger().open_record(state.k + 1);
  switch (cfg.algorithm) {
    case Algorithm::kMasha1:
    case Algorithm::kMasha2:
    case Algorithm::kVrMasha1:
    case Algorithm::kVrMasha2:
    case Algorithm::kPpMasha1:
    case Algorithm::kPpMasha2:
      anchored_step(state, problem, net, cfg, trace);
      break;
    case Algorithm::kExtragradient:
      extragradient_step(state, problem, net, cfg, false, trace);
      break;
    case Algorithm::kCeg:
      extragradient_step(state, problem, net, cfg, true, trace);
      break;
    case Algorithm::kQsgdGda:
    case Algorithm::kEfGda:
      descent_ascent_step(state, problem, net, cfg, trace);
      break;
  }
  ++state.k;
}

double replication_gap(const RunState& state) {
  double gap = 0.0;
  auto diff = [&gap](const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
      gap = std::numeric_limits<double>::infinity();
      return;
    }
    if (a.size() > 0) gap = std::max(gap, (a - b).cwiseAbs().maxCoeff());
  };
  const DeviceState& ref = state.devices.front();
  for (const DeviceState& dev : state.devices) {
    diff(dev.z, ref.z);
    diff(dev.w, ref.w);
    diff(dev.Fw, ref.Fw);
  }
  return gap;
}

Vector hat_point(const Vector& z, const Vector& server_e,
                 const std::vector<Vector>& device_e, double divisor) {
  Vector sum = Vector::Zero(z.size());
  for (const Vector& e : device_e) sum += e;
  return z - server_e - sum / divisor;
}

}  // namespace vicomp
