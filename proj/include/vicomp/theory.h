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

#ifndef VICOMP_THEORY_H_
#define VICOMP_THEORY_H_

#include <cstddef>
#include <string>
#include <vector>

#include "vicomp/algorithms.h"
#include "vicomp/compressor.h"
#include "vicomp/problem.h"

namespace vicomp {

struct TheoryInputs {
  Constants constants;
  std::vector<double> q_dev;  // per device; empty means all 1
  double q_serv = 1.0;
  double delta_dev = 1.0;
  double delta_serv = 1.0;
  double beta = 1.0;          // device density
  double beta_serv = 1.0;
  std::size_t M = 1;
  std::size_t r = 1;
  std::size_t b = 0;          // participants; 0 means M
  Regime regime = Regime::kStronglyMonotone;
  double epsilon = 1e-6;
  double R0 = 1.0;            // ||z^0 - z*||

  std::size_t participants() const { return b == 0 ? M : b; }
  void validate() const;
};

// Fills constants, M, r and compressor parameters from a problem and the
// device/server compressors.
TheoryInputs make_theory_inputs(const VIProblem& problem,
                                const CompressorSpec& device,
                                const CompressorSpec& server,
                                std::size_t participants = 0);

// sqrt((q_serv / M^2) sum_m (q_m L_m^2 + (M - 1) Ltilde^2)).
double cq(const TheoryInputs& in);
// Same with L_m replaced by the per-node component average Ltilde_m.
double cq_tilde(const TheoryInputs& in);
// sqrt((q_serv / (b M)) sum_m (q_m Ltilde_m^2 + (b - 1) Ltilde^2)).
double cq_partial(const TheoryInputs& in);

double masha1_stepsize(const TheoryInputs& in, double tau, double safety = 1.0);
double masha2_stepsize(const TheoryInputs& in, double tau, double safety = 1.0);
double vr_masha1_stepsize(const TheoryInputs& in, double tau, double safety = 1.0);
double vr_masha2_stepsize(const TheoryInputs& in, double tau, double safety = 1.0);
double pp_masha1_stepsize(const TheoryInputs& in, double tau, double safety = 1.0);
double pp_masha2_stepsize(const TheoryInputs& in, double tau, double safety = 1.0);
// min[mu / (48 L^2) (1 + q/M)^{-1}, 1/(4 mu)], strongly monotone only.
double ceg_stepsize(const TheoryInputs& in, double safety = 1.0);
double extragradient_stepsize(const TheoryInputs& in, double safety = 1.0);

// Dispatches on the algorithm; throws for methods without a bound.
double theory_stepsize(Algorithm algorithm, const TheoryInputs& in, double tau,
                       double safety = 1.0);

// 16 q gamma^2 / M^2 sum_m ||F_m(z*)||^2.
double ceg_noise_floor(const TheoryInputs& in, double gamma,
                       double sum_sq_solution_operators);

// 1 - 1/beta, 1 - 1/max(beta, r) or 1 - b/(beta M), clamped to
// [1/2, 1 - 1e-6] and to tau >= 3/4 for the error-feedback family.
double optimal_tau(Algorithm algorithm, double beta, std::size_t r = 1,
                   std::size_t b = 0, std::size_t M = 1);

// Order-of-magnitude iteration count with unit hidden constants. NaN when
// no prediction exists for the algorithm/regime pair.
double iteration_complexity(Algorithm algorithm, const TheoryInputs& in);

struct BoundLine {
  std::string name;
  std::string source;
  double value = 0.0;
  std::string note;
};

// Every bound that applies to the algorithm at the given tau. Throws
// std::domain_error when a theorem precondition fails.
std::vector<BoundLine> stepsize_report(Algorithm algorithm,
                                       const TheoryInputs& in, double tau);

}  // namespace vicomp

#endif  // VICOMP_THEORY_H_
