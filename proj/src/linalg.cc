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

#include "vicomp/linalg.h"

#include <cmath>

namespace vicomp {

PowerIterationResult spectral_norm(const Matrix& a,
                                   const PowerIterationOptions& options) {
  PowerIterationResult result;
  if (a.size() == 0) {
    result.converged = true;
    return result;
  }
  // Deterministic start with a mild index ramp so it is never orthogonal to
  // the dominant singular vector of a structured matrix.
  Vector v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = 1.0 + 0.5 * static_cast<double>(i) / static_cast<double>(v.size());
  }
  v.normalize();

  double previous = 0.0;
  Vector av(a.rows());
  Vector atav(a.cols());
  for (int it = 0; it < options.max_iterations; ++it) {
    av.noalias() = a * v;
    atav.noalias() = a.transpose() * av;
    const double rayleigh = v.dot(atav);  // ||A v||^2 with ||v|| = 1
    result.value = std::sqrt(std::max(rayleigh, 0.0));
    result.iterations = it + 1;
    const double norm = atav.norm();
    if (norm == 0.0) {
      result.value = 0.0;
      result.converged = true;
      return result;
    }
    v = atav / norm;
    if (it > 0 &&
        std::abs(result.value - previous) <= options.tolerance * result.value) {
      result.converged = true;
      return result;
    }
    previous = result.value;
  }
  return result;
}

PowerIterationOptions certified_norm_options() {
  PowerIterationOptions options;
  options.max_iterations = 20000;
  options.tolerance = 1e-13;
  return options;
}

}  // namespace vicomp
