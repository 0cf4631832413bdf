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

#ifndef VICOMP_PROBLEM_H_
#define VICOMP_PROBLEM_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vicomp/linalg.h"

namespace vicomp {

enum class Regime { kStronglyMonotone, kMonotone, kNonMonotoneMinty };

std::string to_string(Regime regime);
Regime parse_regime(const std::string& name);

// Lipschitz / monotonicity constants of a distributed operator
// F = (1/M) sum_m F_m with F_m = (1/r) sum_i F_{m,i}.
struct Constants {
  double L = 0.0;                  // global operator F
  std::vector<double> L_m;         // per node F_m
  std::vector<double> L_m_tilde;   // sqrt((1/r) sum_i L_{m,i}^2), per node
  double L_tilde = 0.0;            // sqrt((1/M) sum_m L_m^2)
  double L_hat = 0.0;              // sqrt((1/M) sum_m (1/r) sum_i L_{m,i}^2)
  double mu = 0.0;                 // strong monotonicity modulus, 0 if none
  Regime regime = Regime::kMonotone;

  double L_max() const;
};

// out = F_{m,i}(z). `out` is resized by the callee.
using ComponentFn = std::function<void(const Vector& z, Vector& out)>;

// F(z) = B z + c.
struct AffineMap {
  Matrix B;
  Vector c;

  Vector apply(const Vector& z) const { return B * z + c; }
};

// A distributed variational inequality on R^d. Immutable after construction,
// so concurrent evaluation from several threads is safe.
class VIProblem {
 public:
  // components[m][i] evaluates F_{m,i}. Every node must have the same number
  // of components r >= 1. `affine_components`, when non-empty, mirrors
  // `components` with the affine representation of each F_{m,i}.
  VIProblem(std::size_t dim, std::vector<std::vector<ComponentFn>> components,
            Constants constants, std::optional<Vector> solution = std::nullopt,
            std::vector<std::vector<AffineMap>> affine_components = {});

  std::size_t dim() const { return dim_; }
  std::size_t nodes() const { return components_.size(); }
  std::size_t components_per_node() const { return components_.front().size(); }

  // F_m(z).
  Vector eval_operator(std::size_t m, const Vector& z) const;
  void eval_operator(std::size_t m, const Vector& z, Vector& out) const;

  // F_{m,i}(z). For r = 1 this coincides bitwise with eval_operator.
  Vector eval_component(std::size_t m, std::size_t i, const Vector& z) const;
  void eval_component(std::size_t m, std::size_t i, const Vector& z,
                      Vector& out) const;

  // F(z) = (1/M) sum_m F_m(z), summed in device order.
  Vector eval(const Vector& z) const;

  const Constants& constants() const { return constants_; }
  const std::optional<Vector>& solution() const { return solution_; }

  bool is_affine() const { return !affine_.empty(); }
  const AffineMap& affine_component(std::size_t m, std::size_t i) const;
  // Averaged affine form of F; only valid when is_affine().
  const AffineMap& global_affine() const { return global_affine_; }

 private:
  void check_node(std::size_t m) const;
  void check_dim(const Vector& z) const;

  std::size_t dim_;
  std::vector<std::vector<ComponentFn>> components_;
  Constants constants_;
  std::optional<Vector> solution_;
  std::vector<std::vector<AffineMap>> affine_;
  AffineMap global_affine_;
};

// Builds a problem from affine components, certifying every Lipschitz
// constant by power iteration. `mu` and `regime` are taken as given;
// `solution` is validated against the residual invariant when present.
VIProblem make_affine_problem(std::vector<std::vector<AffineMap>> components,
                              Regime regime, double mu,
                              std::optional<Vector> solution = std::nullopt);

// Splits every node into r finite-sum components by row blocks:
// F_{m,i} = r * P_i F_m where P_i keeps the i-th block of coordinates.
// Requires an affine problem.
VIProblem split_row_blocks(const VIProblem& problem, std::size_t r);

// ---------------------------------------------------------------------------
// Bilinear saddle point family
//   g_m(x, y) = x^T A_m y + a_m^T x + b_m^T y + (lambda/2)|x|^2 - (lambda/2)|y|^2
// mapped to z = (x, y) and F_m(z) = [A_m y + a_m + lambda x;
//                                    -A_m^T x - b_m + lambda y].

struct BilinearSpec {
  std::vector<Matrix> A;
  std::vector<Vector> a;
  std::vector<Vector> b;
  double lambda = 0.0;

  std::size_t nodes() const { return A.size(); }
  std::size_t half_dim() const { return A.empty() ? 0 : A.front().rows(); }
};

struct LambdaMode {
  enum class Kind { kPaperRule, kExplicit } kind = Kind::kPaperRule;
  double value = 0.0;

  static LambdaMode paper_rule() { return {}; }
  static LambdaMode explicit_value(double v) { return {Kind::kExplicit, v}; }
};

inline constexpr double kBilinearRidge = 1e-3;
inline constexpr double kPaperLambdaDivisor = 1e5;

// Random instance: A_m = B^T B + 1e-3 I with B_ij ~ N(0, 1), a_m and b_m with
// entries uniform on [-1, 1]. The default rule sets lambda = max_m |A_m|_2/1e5.
BilinearSpec generate_bilinear_spec(std::size_t d, std::size_t M,
                                    std::uint64_t seed, LambdaMode mode);

// Solves F(z) = 0 for the averaged bilinear operator. Throws
// std::domain_error when the system is singular or its condition estimate
// exceeds 1e14, and std::invalid_argument for lambda < 0.
Vector exact_solution_bilinear(const BilinearSpec& spec);

// L_m = |A_m|_2 + lambda (conservative), L = |mean A_m|_2 + lambda,
// mu = lambda. Regime is strongly monotone for lambda > 0, monotone otherwise.
VIProblem make_bilinear(const BilinearSpec& spec);
VIProblem make_bilinear(std::size_t d, std::size_t M, std::uint64_t seed,
                        LambdaMode mode);

// Binary container for bilinear instances (little endian):
//   char[8] magic "VICBLN01", u32 d, u32 M, f64 lambda,
//   then per node: A_m (d*d f64, row-major), a_m (d f64), b_m (d f64).
void write_bilinear(std::ostream& out, const BilinearSpec& spec);
BilinearSpec read_bilinear(std::istream& in);
void save_bilinear(const std::string& path, const BilinearSpec& spec);
BilinearSpec load_bilinear(const std::string& path);

// ---------------------------------------------------------------------------
// Rotation family: F_m(z) = B_m (z - center) on R^{2p}, where the average
// B = J + eps I with J the block rotation [[0, 1], [-1, 0]] on each coordinate
// pair. Node matrices differ by zero-mean skew perturbations of size
// `heterogeneity`. eps = 0 is a pure rotation; small eps > 0 is the minty
// (non-monotone regime) test instance.
VIProblem make_rotation(std::size_t pairs, std::size_t M, double eps,
                        const Vector& center, double heterogeneity = 0.0,
                        std::uint64_t seed = 0);

}  // namespace vicomp

#endif  // VICOMP_PROBLEM_H_
