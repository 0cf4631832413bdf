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

#ifndef VICOMP_LINALG_H_
#define VICOMP_LINALG_H_

#include <Eigen/Dense>

namespace vicomp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct PowerIterationOptions {
  int max_iterations = 50;
  // Stop once the relative change of the Rayleigh quotient drops below this.
  double tolerance = 1e-10;
};

struct PowerIterationResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest singular value ||A||_2, by power iteration on A^T A. The estimate
// is a Rayleigh quotient and therefore never exceeds the true norm.
PowerIterationResult spectral_norm(const Matrix& a,
                                   const PowerIterationOptions& options = {});

// Options used when certifying Lipschitz constants of problem instances.
PowerIterationOptions certified_norm_options();

}  // namespace vicomp

#endif  // VICOMP_LINALG_H_
