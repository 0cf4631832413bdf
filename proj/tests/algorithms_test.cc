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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "test_util.h"
#include "vicomp/compressor.h"
#include "vicomp/problem.h"
#include "vicomp/simnet.h"

namespace vicomp {
namespace {

using testing::bitwise_equal;
using testing::scaled_identity;
using testing::vec;

Network make_net(const VIProblem& p, const CompressorSpec& dev,
                 const CompressorSpec& serv, std::uint64_t seed) {
  return Network(std::vector<CompressorSpec>(p.nodes(), dev), serv, seed);
}

Network identity_net(const VIProblem& p, std::uint64_t seed = 1) {
  const auto id = CompressorSpec::identity(p.dim());
  return make_net(p, id, id, seed);
}

AlgoConfig config(Algorithm a, double gamma, double tau = 0.5) {
  AlgoConfig c;
  c.algorithm = a;
  c.gamma = gamma;
  c.tau = tau;
  return c;
}

std::vector<Vector> trajectory(const VIProblem& p, Network net, const AlgoConfig& cfg,
                               const Vector& z0, std::size_t K) {
  RunState s = init_state(p, net, cfg, z0);
  std::vector<Vector> out{s.z()};
  for (std::size_t k = 0; k < K; ++k) {
    step(s, p, net, cfg);
    out.push_back(s.z());
    out.push_back(s.w());
  }
  return out;
}

void expect_same_trajectory(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_TRUE(bitwise_equal(a[i], b[i])) << "first difference at entry " << i;
  }
}

VIProblem small_bilinear(std::size_t d = 5, std::size_t M = 3, std::uint64_t seed = 2) {
  return make_bilinear(d, M, seed, LambdaMode::explicit_value(0.5));
}

TEST(Masha1, HandComputedStep) {
  const VIProblem p = scaled_identity(1);
  Network net = identity_net(p);
  const AlgoConfig cfg = config(Algorithm::kMasha1, 0.25, 0.5);
  RunState s = init_state(p, net, cfg, vec({1.0}));
  net.force_coins({false});
  StepTrace trace;
  step(s, p, net, cfg, &trace);
  EXPECT_DOUBLE_EQ(trace.z_half[0], 0.75);
  EXPECT_DOUBLE_EQ(trace.server_sent[0], -0.25);
  EXPECT_DOUBLE_EQ(s.z()[0], 0.8125);
  EXPECT_DOUBLE_EQ(s.w()[0], 1.0);
  EXPECT_FALSE(trace.full_sync);
  EXPECT_EQ(net.ledger().full_sync_events(), 0u);
}

// With w = z the first step is an extragradient step corrected by F(z).
TEST(Masha1, FirstStepMatchesIndependentFormula) {
  const VIProblem p = small_bilinear();
  const Vector z0 = Vector::LinSpaced(10, -1.0, 1.0);
  for (double tau : {0.1, 0.5, 0.9}) {
    Network net = identity_net(p);
    const AlgoConfig cfg = config(Algorithm::kMasha1, 0.03, tau);
    RunState s = init_state(p, net, cfg, z0);
    step(s, p, net, cfg);
    const Vector half = z0 - 0.03 * p.eval(z0);
    const Vector z1 = half - 0.03 * (p.eval(half) - p.eval(z0));
    EXPECT_LE((s.z() - z1).norm(), 1e-13 * z1.norm());
  }
}

TEST(Masha1, SyncBranchRecomputesReferencePoint) {
  const VIProblem p = small_bilinear();
  const Vector z0 = Vector::LinSpaced(10, -1.0, 1.0);
  for (WUpdate mode : {WUpdate::kCurrentIterate, WUpdate::kNextIterate}) {
    Network net = identity_net(p);
    AlgoConfig cfg = config(Algorithm::kMasha1, 0.03, 0.5);
    cfg.w_update = mode;
    RunState s = init_state(p, net, cfg, z0);
    net.force_coins({false, true});
    step(s, p, net, cfg);
    const Vector z1 = s.z();
    StepTrace trace;
    step(s, p, net, cfg, &trace);
    EXPECT_TRUE(trace.full_sync);
    const Vector expected_w = mode == WUpdate::kCurrentIterate ? z1 : s.z();
    EXPECT_TRUE(bitwise_equal(s.w(), expected_w));
    EXPECT_LE((s.Fw() - p.eval(expected_w)).norm(), 1e-13 * (1 + s.Fw().norm()));
    EXPECT_EQ(net.ledger().full_sync_events(), 1u);
    EXPECT_TRUE(net.ledger().records().back().full_sync);
    EXPECT_EQ(replication_gap(s), 0.0);
  }
}

TEST(Masha1, SolutionIsFixedPoint) {
  const VIProblem p = small_bilinear();
  for (Algorithm a : {Algorithm::kMasha1, Algorithm::kMasha2, Algorithm::kExtragradient}) {
    Network net = identity_net(p);
    const AlgoConfig cfg = config(a, 0.03, 0.75);
    RunState s = init_state(p, net, cfg, *p.solution());
    for (int k = 0; k < 20; ++k) step(s, p, net, cfg);
    EXPECT_LE((s.z() - *p.solution()).norm(), 1e-12 * (1 + p.solution()->norm()))
        << to_string(a);
  }
}

TEST(Extragradient, HandComputedStep) {
  const VIProblem p = scaled_identity(1);
  Network net = identity_net(p);
  const AlgoConfig cfg = config(Algorithm::kExtragradient, 0.5);
  RunState s = init_state(p, net, cfg, vec({1.0}));
  step(s, p, net, cfg);
  EXPECT_DOUBLE_EQ(s.last_half[0], 0.5);
  EXPECT_DOUBLE_EQ(s.z()[0], 0.75);
  // Two uncompressed exchanges, one device, broadcast counted once.
  EXPECT_EQ(net.ledger().uplink_payload_bits(), 128u);
  EXPECT_EQ(net.ledger().downlink_payload_bits(), 128u);
}

TEST(Extragradient, DistanceDecreasesMonotonically) {
  const VIProblem p = small_bilinear(6, 4, 8);
  Network net = identity_net(p);
  const AlgoConfig cfg = config(Algorithm::kExtragradient, 0.5 / p.constants().L);
  RunState s = init_state(p, net, cfg, Vector::Zero(12));
  double prev = (s.z() - *p.solution()).norm();
  for (int k = 0; k < 300; ++k) {
    step(s, p, net, cfg);
    const double now = (s.z() - *p.solution()).norm();
    EXPECT_LE(now, prev * (1 + 1e-14));
    prev = now;
  }
}

TEST(Reductions, Masha2EqualsMasha1UnderIdentity) {
  const VIProblem p = small_bilinear();
  const Vector z0 = Vector::LinSpaced(10, 0.3, -0.8);
  const auto a = trajectory(p, identity_net(p, 5), config(Algorithm::kMasha1, 0.015625, 0.75), z0, 300);
  const auto b = trajectory(p, identity_net(p, 5), config(Algorithm::kMasha2, 0.015625, 0.75), z0, 300);
  expect_same_trajectory(a, b);
}

TEST(Reductions, VrWithOneComponentEqualsBase) {
  const VIProblem p = small_bilinear();
  const Vector z0 = Vector::LinSpaced(10, 0.3, -0.8);
  const auto rk = CompressorSpec::rand_k(10, 3);
  const auto tk = CompressorSpec::top_k(10, 3);
  const auto id = CompressorSpec::identity(10);
  expect_same_trajectory(
      trajectory(p, make_net(p, rk, id, 3), config(Algorithm::kMasha1, 0.01, 0.7), z0, 200),
      trajectory(p, make_net(p, rk, id, 3), config(Algorithm::kVrMasha1, 0.01, 0.7), z0, 200));
  expect_same_trajectory(
      trajectory(p, make_net(p, tk, tk, 3), config(Algorithm::kMasha2, 0.01, 0.8), z0, 200),
      trajectory(p, make_net(p, tk, tk, 3), config(Algorithm::kVrMasha2, 0.01, 0.8), z0, 200));
}

TEST(Reductions, FullParticipationEqualsBase) {
  const VIProblem p = small_bilinear();
  const Vector z0 = Vector::LinSpaced(10, 0.3, -0.8);
  const auto rk = CompressorSpec::rand_k(10, 3);
  const auto tk = CompressorSpec::top_k(10, 3);
  const auto id = CompressorSpec::identity(10);
  AlgoConfig pp1 = config(Algorithm::kPpMasha1, 0.01, 0.7);
  pp1.participants = 3;
  AlgoConfig pp2 = config(Algorithm::kPpMasha2, 0.01, 0.8);
  pp2.participants = 3;
  expect_same_trajectory(
      trajectory(p, make_net(p, rk, id, 4), config(Algorithm::kMasha1, 0.01, 0.7), z0, 200),
      trajectory(p, make_net(p, rk, id, 4), pp1, z0, 200));
  expect_same_trajectory(
      trajectory(p, make_net(p, tk, tk, 4), config(Algorithm::kMasha2, 0.01, 0.8), z0, 200),
      trajectory(p, make_net(p, tk, tk, 4), pp2, z0, 200));
}

TEST(Reductions, CegEqualsExtragradientUnderIdentity) {
  const VIProblem p = small_bilinear();
  const Vector z0 = Vector::LinSpaced(10, 0.3, -0.8);
  expect_same_trajectory(
      trajectory(p, identity_net(p, 7), config(Algorithm::kExtragradient, 0.02), z0, 200),
      trajectory(p, identity_net(p, 7), config(Algorithm::kCeg, 0.02), z0, 200));
}

TEST(Masha2, IdentityKeepsResidualsZero) {
  const VIProblem p = small_bilinear();
  Network net = identity_net(p);
  const AlgoConfig cfg = config(Algorithm::kMasha2, 0.02, 0.75);
  RunState s = init_state(p, net, cfg, Vector::Ones(10));
  for (int k = 0; k < 50; ++k) {
    step(s, p, net, cfg);
    for (const auto& dev : s.devices) EXPECT_EQ(dev.e.norm(), 0.0);
    EXPECT_EQ(s.server_e.norm(), 0.0);
  }
}

TEST(Masha2, ErrorConservationAndHatIdentity) {
  const VIProblem p = small_bilinear(8, 4, 3);
  const auto tk = CompressorSpec::top_k(16, 4);
  const auto ts = CompressorSpec::top_k(16, 8);
  Network net = make_net(p, tk, ts, 9);
  const AlgoConfig cfg = config(Algorithm::kMasha2, 0.01, 0.8);
  RunState s = init_state(p, net, cfg, Vector::Zero(16));
  double worst = 0.0;
  for (int k = 0; k < 300; ++k) {
    std::vector<Vector> e_before;
    for (const auto& dev : s.devices) e_before.push_back(dev.e);
    StepTrace t;
    step(s, p, net, cfg, &t);
    for (std::size_t j = 0; j < t.senders.size(); ++j) {
      const std::size_t m = t.senders[j];
      ASSERT_TRUE(bitwise_equal(t.device_input[j], Vector(cfg.gamma * t.delta[j] + e_before[m])));
      ASSERT_TRUE(bitwise_equal(Vector(t.e_after[m] + t.device_sent[j]), t.device_input[j]));
    }
    ASSERT_TRUE(bitwise_equal(Vector(t.server_e_after + t.server_sent), t.server_input));
    const Vector hat_half = hat_point(t.z_half, t.server_e_before, t.e_before, 4.0);
    const Vector hat_next = hat_point(s.z(), s.server_e, t.e_after, 4.0);
    const Vector oracle = hat_half - cfg.gamma * (p.eval(t.z_half) - p.eval(t.w));
    worst = std::max(worst, (hat_next - oracle).norm() / std::max(oracle.norm(), 1e-300));
  }
  EXPECT_LE(worst, 1e-10);
  EXPECT_GT(s.server_e.norm(), 0.0);
}

TEST(PpMasha2, NonParticipantsKeepResiduals) {
  const VIProblem p = small_bilinear(5, 4, 1);
  const auto tk = CompressorSpec::top_k(10, 2);
  Network net = make_net(p, tk, tk, 2);
  AlgoConfig cfg = config(Algorithm::kPpMasha2, 0.01, 0.8);
  cfg.participants = 2;
  RunState s = init_state(p, net, cfg, Vector::Ones(10));
  for (int k = 0; k < 100; ++k) {
    StepTrace t;
    step(s, p, net, cfg, &t);
    ASSERT_EQ(t.senders.size(), 2u);
    const std::set<std::size_t> in(t.senders.begin(), t.senders.end());
    for (std::size_t m = 0; m < 4; ++m) {
      if (in.count(m)) continue;
      ASSERT_TRUE(bitwise_equal(t.e_after[m], t.e_before[m]));
    }
  }
}

// Enumerating every subset reached by the sampler: the subset average is
// unbiased for the full average of the device differences.
TEST(PpMasha1, SubsetAverageIsUnbiased) {
  const VIProblem p = small_bilinear(3, 4, 6);
  const Vector z0 = Vector::LinSpaced(6, -1.0, 1.0);
  std::map<std::vector<std::size_t>, Vector> by_subset;
  Vector full;
  for (std::uint64_t seed = 0; seed < 200 && by_subset.size() < 6; ++seed) {
    Network net = identity_net(p, seed);
    AlgoConfig cfg = config(Algorithm::kPpMasha1, 0.05, 0.5);
    cfg.participants = 2;
    RunState s = init_state(p, net, cfg, z0);
    StepTrace t;
    step(s, p, net, cfg, &t);
    by_subset[t.senders] = t.server_input;
    Vector sum = Vector::Zero(6);
    for (std::size_t m = 0; m < 4; ++m) {
      sum += p.eval_operator(m, t.z_half) - p.eval_operator(m, z0);
    }
    full = sum / 4.0;
  }
  ASSERT_EQ(by_subset.size(), 6u);
  Vector mean = Vector::Zero(6);
  for (const auto& [subset, avg] : by_subset) mean += avg;
  mean /= 6.0;
  EXPECT_LE((mean - full).norm(), 1e-14 * (1 + full.norm()));
}

TEST(VrMasha1, ComponentDifferenceIsUnbiased) {
  const VIProblem base = small_bilinear(3, 2, 4);
  const VIProblem p = split_row_blocks(base, 3);
  const Vector z0 = Vector::LinSpaced(6, -1.0, 1.0);
  std::map<std::size_t, Vector> by_component;
  Vector full;
  for (std::uint64_t seed = 0; seed < 100 && by_component.size() < 3; ++seed) {
    Network net = identity_net(p, seed);
    const AlgoConfig cfg = config(Algorithm::kVrMasha1, 0.05, 0.5);
    RunState s = init_state(p, net, cfg, z0);
    StepTrace t;
    step(s, p, net, cfg, &t);
    const std::size_t i = s.last_components[0];
    EXPECT_TRUE(bitwise_equal(
        t.delta[0], Vector(p.eval_component(0, i, t.z_half) - p.eval_component(0, i, z0))));
    by_component[i] = t.delta[0];
    full = p.eval_operator(0, t.z_half) - p.eval_operator(0, z0);
  }
  ASSERT_EQ(by_component.size(), 3u);
  Vector mean = Vector::Zero(6);
  for (const auto& [i, delta] : by_component) mean += delta;
  mean /= 3.0;
  EXPECT_LE((mean - full).norm(), 1e-13 * (1 + full.norm()));
}

TEST(VrMasha1, ComponentFrequenciesAreUniform) {
  const VIProblem p = split_row_blocks(small_bilinear(3, 1, 4), 3);
  Network net = identity_net(p, 11);
  const AlgoConfig cfg = config(Algorithm::kVrMasha1, 1e-3, 0.5);
  RunState s = init_state(p, net, cfg, Vector::Zero(6));
  std::vector<int> hits(3, 0);
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    step(s, p, net, cfg);
    ++hits[s.last_components[0]];
  }
  const double sd = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
  for (int h : hits) EXPECT_NEAR(h, n / 3.0, 5 * sd);
}

TEST(DescentAscent, RotationNormGrows) {
  const VIProblem p = make_rotation(1, 1, 0.0, Vector::Zero(2));
  for (double gamma : {0.01, 0.3}) {
    Network net = identity_net(p);
    const AlgoConfig cfg = config(Algorithm::kQsgdGda, gamma);
    RunState s = init_state(p, net, cfg, vec({1.0, 2.0}));
    for (int k = 0; k < 10; ++k) {
      const double before = s.z().squaredNorm();
      step(s, p, net, cfg);
      EXPECT_NEAR(s.z().squaredNorm(), (1 + gamma * gamma) * before, 1e-13 * before);
    }
  }
}

TEST(DescentAscent, IdentityOperatorConverges) {
  const VIProblem p = scaled_identity(4, 2);
  for (Algorithm a : {Algorithm::kQsgdGda, Algorithm::kEfGda}) {
    Network net = identity_net(p);
    const AlgoConfig cfg = config(a, 0.2);
    RunState s = init_state(p, net, cfg, Vector::Ones(4));
    for (int k = 0; k < 200; ++k) step(s, p, net, cfg);
    EXPECT_LE(s.z().norm(), 1e-15) << to_string(a);
  }
}

TEST(DescentAscent, ErrorFeedbackConservation) {
  const VIProblem p = small_bilinear(5, 3, 2);
  const auto tk = CompressorSpec::top_k(10, 3);
  Network net = make_net(p, tk, CompressorSpec::identity(10), 1);
  const AlgoConfig cfg = config(Algorithm::kEfGda, 0.01);
  RunState s = init_state(p, net, cfg, Vector::Ones(10));
  for (int k = 0; k < 100; ++k) {
    StepTrace t;
    step(s, p, net, cfg, &t);
    for (std::size_t m = 0; m < 3; ++m) {
      ASSERT_TRUE(bitwise_equal(t.device_input[m], Vector(cfg.gamma * t.delta[m] + t.e_before[m])));
      ASSERT_TRUE(bitwise_equal(Vector(t.e_after[m] + t.device_sent[m]), t.device_input[m]));
    }
  }
}

TEST(Ledger, AnchoredTrafficPerDevice) {
  const VIProblem p = small_bilinear(50, 3, 2);
  const auto rk = CompressorSpec::rand_k(100, 30);
  Network net = make_net(p, rk, CompressorSpec::identity(100), 6);
  const AlgoConfig cfg = config(Algorithm::kMasha1, 1e-3, 0.7);
  RunState s = init_state(p, net, cfg, Vector::Zero(100));
  const std::size_t K = 400;
  for (std::size_t k = 0; k < K; ++k) step(s, p, net, cfg);
  const std::uint64_t syncs = net.ledger().full_sync_events();
  EXPECT_GT(syncs, 0u);
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_EQ(net.ledger().uplink_payload_bits(m), 6400 + K * 1920 + syncs * 6400);
    EXPECT_EQ(net.ledger().uplink_index_bits(m), K * 210);
  }
  EXPECT_EQ(net.ledger().downlink_payload_bits(), 6400 + K * 6400 + syncs * 6400);
  ASSERT_EQ(net.ledger().records().size(), K + 1);
  for (std::size_t k = 1; k <= K; ++k) {
    const auto& r = net.ledger().records()[k];
    EXPECT_EQ(r.iter, k);
    EXPECT_EQ(r.up_payload, 3 * 1920 + (r.full_sync ? 3 * 6400 : 0));
  }
}

TEST(Replication, DeviceCopiesAgree) {
  const VIProblem p = small_bilinear();
  const auto rk = CompressorSpec::rand_k(10, 3);
  const auto tk = CompressorSpec::top_k(10, 3);
  for (Algorithm a : {Algorithm::kMasha1, Algorithm::kMasha2, Algorithm::kPpMasha1,
                      Algorithm::kPpMasha2, Algorithm::kCeg, Algorithm::kEfGda}) {
    const auto dev = uses_error_feedback(a) ? tk : rk;
    Network net = make_net(p, dev, uses_error_feedback(a) ? tk : CompressorSpec::identity(10), 1);
    AlgoConfig cfg = config(a, 0.01, 0.8);
    cfg.participants = 2;
    RunState s = init_state(p, net, cfg, Vector::Ones(10));
    for (int k = 0; k < 100; ++k) {
      step(s, p, net, cfg);
      ASSERT_EQ(replication_gap(s), 0.0) << to_string(a);
    }
  }
}

TEST(Config, Validation) {
  const VIProblem p = small_bilinear();
  Network net = identity_net(p);
  EXPECT_THROW(init_state(p, net, config(Algorithm::kMasha1, 0.0), Vector::Zero(10)),
               std::invalid_argument);
  EXPECT_THROW(init_state(p, net, config(Algorithm::kMasha1, 0.1, 1.0), Vector::Zero(10)),
               std::invalid_argument);
  AlgoConfig pp = config(Algorithm::kPpMasha1, 0.1);
  pp.participants = 4;
  EXPECT_THROW(init_state(p, net, pp, Vector::Zero(10)), std::invalid_argument);
  EXPECT_THROW(init_state(p, net, config(Algorithm::kMasha1, 0.1), Vector::Zero(9)),
               std::invalid_argument);
}

TEST(Names, ParseAndPrint) {
  for (Algorithm a : {Algorithm::kMasha1, Algorithm::kMasha2, Algorithm::kVrMasha1,
                      Algorithm::kVrMasha2, Algorithm::kPpMasha1, Algorithm::kPpMasha2,
                      Algorithm::kExtragradient, Algorithm::kCeg, Algorithm::kQsgdGda,
                      Algorithm::kEfGda}) {
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  }
  EXPECT_EQ(parse_algorithm("VR-MASHA2"), Algorithm::kVrMasha2);
  EXPECT_EQ(parse_algorithm("eg"), Algorithm::kExtragradient);
  EXPECT_THROW(parse_algorithm("adam"), std::invalid_argument);
  EXPECT_EQ(parse_w_update("z_k_plus_1"), WUpdate::kNextIterate);
  EXPECT_THROW(parse_w_update("zk"), std::invalid_argument);
}

}  // namespace
}  // namespace vicomp
