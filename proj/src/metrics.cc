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

#include "vicomp/metrics.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "vicomp/rng.h"

namespace vicomp {

namespace {

constexpr int kMaxHalvings = 60;

Vector project(const Vector& u, double radius) {
  const double n = u.norm();
  return n > radius ? Vector(u * (radius / n)) : u;
}

Vector random_in_ball(std::size_t dim, double radius, Rng& rng) {
  Vector v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = standard_normal(rng);
  const double n = v.norm();
  if (n == 0.0) return Vector::Zero(dim);
  const double scale =
      radius * std::pow(uniform01(rng), 1.0 / static_cast<double>(dim)) / n;
  return v * scale;
}

class GapObjective {
 public:
  GapObjective(const VIProblem& problem, const Vector& z_bar)
      : problem_(problem), z_bar_(z_bar) {}

  double value(const Vector& u) const {
    const double v = operator_at(u).dot(z_bar_ - u);
    if (!std::isfinite(v)) {
      throw std::domain_error("gap_estimate: non-finite objective value");
    }
    return v;
  }

  Vector gradient(const Vector& u) const {
    if (problem_.is_affine()) {
      const AffineMap& F = problem_.global_affine();
      return F.B.transpose() * (z_bar_ - u) - (F.B * u + F.c);
    }
    const double h = 1e-6 * (1.0 + u.norm());
    Vector g(u.size());
    Vector probe = u;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      probe[i] = u[i] + h;
      const double up = value(probe);
      probe[i] = u[i] - h;
      const double down = value(probe);
      probe[i] = u[i];
      g[i] = (up - down) / (2.0 * h);
    }
    return g;
  }

 private:
  Vector operator_at(const Vector& u) const {
    if (problem_.is_affine()) {
      const AffineMap& F = problem_.global_affine();
      return F.B * u + F.c;
    }
    return problem_.eval(u);
  }

  const VIProblem& problem_;
  const Vector& z_bar_;
};

double ascend(const GapObjective& phi, Vector u, double radius,
              std::size_t iterations) {
  u = project(u, radius);
  double best = phi.value(u);
  double step = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    const Vector g = phi.gradient(u);
    const double gn = g.norm();
    if (!(gn > 0.0)) break;
    if (step == 0.0) step = radius / gn;
    bool moved = false;
    for (int h = 0; h < kMaxHalvings; ++h) {
      Vector candidate = project(u + step * g, radius);
      const double v = phi.value(candidate);
      if (v > best) {
        best = v;
        u = std::move(candidate);
        step *= 2.0;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return best;
}

}  // namespace

double dist_sq(const Vector& z, const Vector& z_star) {
  if (z.size() != z_star.size()) {
    throw std::invalid_argument("dist_sq: dimension mismatch");
  }
  return (z - z_star).squaredNorm();
}

double op_norm_sq(const VIProblem& problem, const Vector& w) {
  return problem.eval(w).squaredNorm();
}

double default_gap_radius(const VIProblem& problem, const Vector& z0) {
  double r = z0.norm();
  if (problem.solution()) r = std::max(r, problem.solution()->norm());
  return 2.0 * r;
}

double gap_estimate(const VIProblem& problem, const Vector& z_bar,
                    const GapOptions& options) {
  if (static_cast<std::size_t>(z_bar.size()) != problem.dim()) {
    throw std::invalid_argument("gap_estimate: dimension mismatch");
  }
  if (!z_bar.allFinite()) {
    throw std::domain_error("gap_estimate: non-finite point");
  }
  const double radius = options.radius > 0.0
                            ? options.radius
                            : default_gap_radius(problem, z_bar);
  if (!(radius > 0.0)) return 0.0;
  const GapObjective phi(problem, z_bar);

  std::vector<Vector> starts;
  if (problem.solution() && problem.solution()->norm() <= radius) {
    starts.push_back(*problem.solution());
  }
  starts.push_back(Vector::Zero(problem.dim()));
  starts.push_back(project(z_bar, radius));
  for (std::size_t i = 0; i < options.restarts; ++i) {
    Rng rng = make_stream(options.seed, Stream::kGapStarts, {i});
    starts.push_back(random_in_ball(problem.dim(), radius, rng));
  }

  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& s : starts) {
    best = std::max(best, ascend(phi, s, radius, options.iterations));
  }
  return best;
}

}  // namespace vicomp
