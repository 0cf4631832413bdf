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

#include "vicomp/problem.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "vicomp/rng.h"

namespace vicomp {

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::kStronglyMonotone:
      return "strongly_monotone";
    case Regime::kMonotone:
      return "monotone";
    case Regime::kNonMonotoneMinty:
      return "non_monotone";
  }
  return "unknown";
}

Regime parse_regime(const std::string& name) {
  if (name == "strongly_monotone" || name == "sm") return Regime::kStronglyMonotone;
  if (name == "monotone" || name == "m") return Regime::kMonotone;
  if (name == "non_monotone" || name == "minty" || name == "nm") {
    return Regime::kNonMonotoneMinty;
  }
  throw std::invalid_argument("unknown regime '" + name + "'");
}

double Constants::L_max() const {
  double out = 0.0;
  for (double l : L_m) out = std::max(out, l);
  return out;
}

VIProblem::VIProblem(std::size_t dim,
                     std::vector<std::vector<ComponentFn>> components,
                     Constants constants, std::optional<Vector> solution,
                     std::vector<std::vector<AffineMap>> affine_components)
    : dim_(dim),
      components_(std::move(components)),
      constants_(std::move(constants)),
      solution_(std::move(solution)),
      affine_(std::move(affine_components)) {
  if (dim_ == 0) throw std::invalid_argument("VIProblem: dimension must be >= 1");
  if (components_.empty()) {
    throw std::invalid_argument("VIProblem: at least one node required");
  }
  const std::size_t r = components_.front().size();
  if (r == 0) throw std::invalid_argument("VIProblem: r must be >= 1");
  for (const auto& node : components_) {
    if (node.size() != r) {
      throw std::invalid_argument("VIProblem: nodes must have equal r");
    }
  }
  if (solution_ && static_cast<std::size_t>(solution_->size()) != dim_) {
    throw std::invalid_argument("VIProblem: solution has wrong dimension");
  }
  if (!affine_.empty()) {
    if (affine_.size() != components_.size()) {
      throw std::invalid_argument("VIProblem: affine data does not match nodes");
    }
    global_affine_.B = Matrix::Zero(dim_, dim_);
    global_affine_.c = Vector::Zero(dim_);
    for (const auto& node : affine_) {
      if (node.size() != r) {
        throw std::invalid_argument("VIProblem: affine data does not match r");
      }
      for (const auto& map : node) {
        global_affine_.B += map.B;
        global_affine_.c += map.c;
      }
    }
    const double scale = 1.0 / static_cast<double>(components_.size() * r);
    global_affine_.B *= scale;
    global_affine_.c *= scale;
  }
}

void VIProblem::check_node(std::size_t m) const {
  if (m >= components_.size()) {
    throw std::out_of_range("node index " + std::to_string(m) +
                            " out of range");
  }
}

void VIProblem::check_dim(const Vector& z) const {
  if (static_cast<std::size_t>(z.size()) != dim_) {
    throw std::invalid_argument("dimension mismatch: expected " +
                                std::to_string(dim_) + ", got " +
                                std::to_string(z.size()));
  }
}

void VIProblem::eval_operator(std::size_t m, const Vector& z,
                              Vector& out) const {
  check_node(m);
  check_dim(z);
  const auto& node = components_[m];
  if (node.size() == 1) {
    node.front()(z, out);
    return;
  }
  Vector part;
  node.front()(z, out);
  for (std::size_t i = 1; i < node.size(); ++i) {
    node[i](z, part);
    out += part;
  }
  out /= static_cast<double>(node.size());
}

Vector VIProblem::eval_operator(std::size_t m, const Vector& z) const {
  Vector out;
  eval_operator(m, z, out);
  return out;
}

void VIProblem::eval_component(std::size_t m, std::size_t i, const Vector& z,
                               Vector& out) const {
  check_node(m);
  check_dim(z);
  if (i >= components_[m].size()) {
    throw std::out_of_range("component index " + std::to_string(i) +
                            " out of range");
  }
  components_[m][i](z, out);
}

Vector VIProblem::eval_component(std::size_t m, std::size_t i,
                                 const Vector& z) const {
  Vector out;
  eval_component(m, i, z, out);
  return out;
}

Vector VIProblem::eval(const Vector& z) const {
  Vector sum;
  Vector part;
  eval_operator(0, z, sum);
  for (std::size_t m = 1; m < nodes(); ++m) {
    eval_operator(m, z, part);
    sum += part;
  }
  sum /= static_cast<double>(nodes());
  return sum;
}

const AffineMap& VIProblem::affine_component(std::size_t m,
                                             std::size_t i) const {
  if (affine_.empty()) throw std::logic_error("problem is not affine");
  check_node(m);
  if (i >= affine_[m].size()) throw std::out_of_range("component out of range");
  return affine_[m][i];
}

namespace {

void check_solution_residual(const VIProblem& problem) {
  if (!problem.solution()) return;
  const Vector& z = *problem.solution();
  const double residual = problem.eval(z).norm();
  if (!(residual <= 1e-8 * (1.0 + z.norm()))) {
    throw std::domain_error("solution residual " + std::to_string(residual) +
                            " violates |F(z*)| <= 1e-8 (1 + |z*|)");
  }
}

}  // namespace

VIProblem make_affine_problem(std::vector<std::vector<AffineMap>> components,
                              Regime regime, double mu,
                              std::optional<Vector> solution) {
  if (components.empty() || components.front().empty()) {
    throw std::invalid_argument("make_affine_problem: empty component list");
  }
  if (mu < 0.0) throw std::invalid_argument("make_affine_problem: mu < 0");
  const std::size_t dim = components.front().front().c.size();
  const std::size_t M = components.size();
  const std::size_t r = components.front().size();
  const auto norm_options = certified_norm_options();

  Constants constants;
  constants.mu = mu;
  constants.regime = regime;
  Matrix global = Matrix::Zero(dim, dim);
  double sum_lm_sq = 0.0;
  double sum_lmi_sq = 0.0;
  std::vector<std::vector<ComponentFn>> fns(M);
  for (std::size_t m = 0; m < M; ++m) {
    if (components[m].size() != r) {
      throw std::invalid_argument("make_affine_problem: nodes must have equal r");
    }
    Matrix node = Matrix::Zero(dim, dim);
    double node_lmi_sq = 0.0;
    for (const AffineMap& map : components[m]) {
      if (static_cast<std::size_t>(map.B.rows()) != dim ||
          static_cast<std::size_t>(map.B.cols()) != dim ||
          static_cast<std::size_t>(map.c.size()) != dim) {
        throw std::invalid_argument("make_affine_problem: inconsistent shapes");
      }
      node += map.B;
      const double lmi = spectral_norm(map.B, norm_options).value;
      node_lmi_sq += lmi * lmi;
      fns[m].push_back([B = map.B, c = map.c](const Vector& z, Vector& out) {
        out.noalias() = B * z;
        out += c;
      });
    }
    node /= static_cast<double>(r);
    global += node;
    const double lm = r == 1 ? std::sqrt(node_lmi_sq)
                             : spectral_norm(node, norm_options).value;
    constants.L_m.push_back(lm);
    constants.L_m_tilde.push_back(std::sqrt(node_lmi_sq / static_cast<double>(r)));
    sum_lm_sq += lm * lm;
    sum_lmi_sq += node_lmi_sq / static_cast<double>(r);
  }
  global /= static_cast<double>(M);
  constants.L = spectral_norm(global, norm_options).value;
  constants.L_tilde = std::sqrt(sum_lm_sq / static_cast<double>(M));
  constants.L_hat = std::sqrt(sum_lmi_sq / static_cast<double>(M));

  VIProblem problem(dim, std::move(fns), std::move(constants),
                    std::move(solution), std::move(components));
  check_solution_residual(problem);
  return problem;
}

VIProblem split_row_blocks(const VIProblem& problem, std::size_t r) {
  if (!problem.is_affine()) {
    throw std::invalid_argument("split_row_blocks: problem must be affine");
  }
  if (problem.components_per_node() != 1) {
    throw std::invalid_argument("split_row_blocks: problem is already split");
  }
  const std::size_t d = problem.dim();
  if (r == 0 || r > d) {
    throw std::invalid_argument("split_row_blocks: need 1 <= r <= dim");
  }
  std::vector<std::vector<AffineMap>> components(problem.nodes());
  for (std::size_t m = 0; m < problem.nodes(); ++m) {
    const AffineMap& full = problem.affine_component(m, 0);
    for (std::size_t i = 0; i < r; ++i) {
      const std::size_t begin = i * d / r;
      const std::size_t end = (i + 1) * d / r;
      AffineMap part{Matrix::Zero(d, d), Vector::Zero(d)};
      const auto rows = static_cast<Eigen::Index>(end - begin);
      const auto start = static_cast<Eigen::Index>(begin);
      part.B.middleRows(start, rows) =
          static_cast<double>(r) * full.B.middleRows(start, rows);
      part.c.segment(start, rows) =
          static_cast<double>(r) * full.c.segment(start, rows);
      components[m].push_back(std::move(part));
    }
  }
  const Constants& base = problem.constants();
  return make_affine_problem(std::move(components), base.regime, base.mu,
                             problem.solution());
}

VIProblem make_rotation(std::size_t pairs, std::size_t M, double eps,
                        const Vector& center, double heterogeneity,
                        std::uint64_t seed) {
  if (pairs == 0 || M == 0) {
    throw std::invalid_argument("make_rotation: need pairs >= 1 and M >= 1");
  }
  const std::size_t dim = 2 * pairs;
  if (static_cast<std::size_t>(center.size()) != dim) {
    throw std::invalid_argument("make_rotation: center has wrong dimension");
  }
  Matrix base = eps * Matrix::Identity(dim, dim);
  for (std::size_t p = 0; p < pairs; ++p) {
    base(2 * p, 2 * p + 1) = 1.0;
    base(2 * p + 1, 2 * p) = -1.0;
  }
  std::vector<Matrix> skew(M, Matrix::Zero(dim, dim));
  if (heterogeneity > 0.0 && M > 1) {
    Rng rng = make_stream(seed, Stream::kProblem, {0x726f74});
    Matrix mean = Matrix::Zero(dim, dim);
    for (auto& s : skew) {
      for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i + 1; j < dim; ++j) {
          const double v = heterogeneity * standard_normal(rng);
          s(i, j) = v;
          s(j, i) = -v;
        }
      }
      mean += s;
    }
    mean /= static_cast<double>(M);
    for (auto& s : skew) s -= mean;
  }
  std::vector<std::vector<AffineMap>> components(M);
  for (std::size_t m = 0; m < M; ++m) {
    Matrix B = base + skew[m];
    Vector c = -(B * center);
    components[m].push_back({std::move(B), std::move(c)});
  }
  return make_affine_problem(std::move(components), Regime::kNonMonotoneMinty,
                             eps, center);
}

}  // namespace vicomp
