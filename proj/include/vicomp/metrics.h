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

#ifndef VICOMP_METRICS_H_
#define VICOMP_METRICS_H_

#include <cstddef>
#include <cstdint>

#include "vicomp/linalg.h"
#include "vicomp/problem.h"

namespace vicomp {

double dist_sq(const Vector& z, const Vector& z_star);

// ||F(w)||^2 for the averaged operator.
double op_norm_sq(const VIProblem& problem, const Vector& w);

struct GapOptions {
  double radius = 0.0;  // <= 0 selects default_gap_radius
  std::size_t restarts = 8;
  std::size_t iterations = 200;
  std::uint64_t seed = 0;
};

// 2 max(||z0||, ||z*||), with z* omitted when unknown.
double default_gap_radius(const VIProblem& problem, const Vector& z0);

// Lower estimate of sup_{||u|| <= R} <F(u), z_bar - u> found by projected
// gradient ascent from z*, the origin, the projection of z_bar and
// `restarts` random points of the ball. Every start is also a candidate, so
// adding restarts never lowers the result.
double gap_estimate(const VIProblem& problem, const Vector& z_bar,
                    const GapOptions& options);

}  // namespace vicomp

#endif  // VICOMP_METRICS_H_
