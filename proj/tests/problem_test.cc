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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "test_util.h"
#include "vicomp/rng.h"

namespace vicomp {
namespace {

using testing::bitwise_equal;
using testing::vec;

BilinearSpec one_dim(double A, double a, double b, double lambda) {
  BilinearSpec s;
  s.A = {Matrix::Constant(1, 1, A)};
  s.a = {Vector::Constant(1, a)};
  s.b = {Vector::Constant(1, b)};
  s.lambda = lambda;
  return s;
}

TEST(Bilinear, EvalMatchesHandArithmetic) {
  const VIProblem p = make_bilinear(one_dim(2.0, 0.0, 0.0, 1.0));
  const Vector F = p.eval(vec({1.0, 1.0}));
  EXPECT_DOUBLE_EQ(F[0], 3.0);
  EXPECT_DOUBLE_EQ(F[1], -1.0);
}

TEST(Bilinear, OneDimensionalSolve) {
  const Vector z = exact_solution_bilinear(one_dim(1.0, 1.0, 0.0, 1.0));
  EXPECT_NEAR(z[0], -0.5, 1e-15);
  EXPECT_NEAR(z[1], -0.5, 1e-15);
}

TEST(Bilinear, ZeroDataHasZeroSolution) {
  BilinearSpec s;
  s.A = {Matrix::Zero(3, 3)};
  s.a = {Vector::Zero(3)};
  s.b = {Vector::Zero(3)};
  s.lambda = 1.0;
  EXPECT_EQ(exact_solution_bilinear(s).norm(), 0.0);
}

TEST(Bilinear, SolutionResidual) {
  for (std::size_t d : {2u, 5u}) {
    const VIProblem p = make_bilinear(d, d == 2 ? 1 : 3, 7, LambdaMode::explicit_value(1.0));
    ASSERT_TRUE(p.solution().has_value());
    EXPECT_LE(p.eval(*p.solution()).norm(), 1e-10);
  }
  const VIProblem paper = make_bilinear(5, 4, 3, LambdaMode::paper_rule());
  EXPECT_LE(paper.eval(*paper.solution()).norm(), 1e-10);
}

TEST(Bilinear, RejectsNegativeLambdaAndSingularSystems) {
  EXPECT_THROW(exact_solution_bilinear(one_dim(1.0, 0.0, 0.0, -1.0)),
               std::invalid_argument);
  BilinearSpec s;
  s.A = {Matrix::Zero(2, 2)};
  s.A[0](0, 0) = 1.0;
  s.a = {Vector::Zero(2)};
  s.b = {Vector::Zero(2)};
  s.lambda = 0.0;
  EXPECT_THROW(exact_solution_bilinear(s), std::domain_error);
  EXPECT_THROW(make_bilinear(3, 2, 1, LambdaMode::explicit_value(-0.5)),
               std::invalid_argument);
}

TEST(Bilinear, DefaultLambdaRule) {
  const BilinearSpec s = generate_bilinear_spec(100, 16, 1, LambdaMode::paper_rule());
  double max_norm = 0.0;
  for (const Matrix& A : s.A) {
    max_norm = std::max(max_norm, Eigen::JacobiSVD<Matrix>(A).singularValues()[0]);
  }
  EXPECT_NEAR(s.lambda, max_norm / 1e5, 1e-12 * max_norm);
  const VIProblem p = make_bilinear(s);
  EXPECT_EQ(p.constants().regime, Regime::kStronglyMonotone);
  EXPECT_DOUBLE_EQ(p.constants().mu, s.lambda);
}

TEST(Bilinear, GenerationIsDeterministic) {
  const BilinearSpec a = generate_bilinear_spec(6, 3, 42, LambdaMode::paper_rule());
  const BilinearSpec b = generate_bilinear_spec(6, 3, 42, LambdaMode::paper_rule());
  const BilinearSpec c = generate_bilinear_spec(6, 3, 43, LambdaMode::paper_rule());
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_TRUE(a.A[m] == b.A[m]);
    EXPECT_TRUE(bitwise_equal(a.a[m], b.a[m]));
    EXPECT_TRUE(bitwise_equal(a.b[m], b.b[m]));
  }
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_FALSE(a.A[0] == c.A[0]);
}

TEST(Bilinear, MatricesArePositiveDefinite) {
  const BilinearSpec s = generate_bilinear_spec(8, 4, 5, LambdaMode::paper_rule());
  for (const Matrix& A : s.A) {
    EXPECT_TRUE(A == A.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(A);
    EXPECT_GE(eig.eigenvalues().minCoeff(), 0.9e-3);
  }
}

TEST(Bilinear, SerializationRoundTrip) {
  const BilinearSpec s = generate_bilinear_spec(4, 3, 9, LambdaMode::explicit_value(0.25));
  std::stringstream buf;
  write_bilinear(buf, s);
  EXPECT_EQ(buf.str().size(), 8u + 4 + 4 + 8 + 3 * (16 + 4 + 4) * 8);
  EXPECT_EQ(buf.str().substr(0, 8), "VICBLN01");
  const BilinearSpec t = read_bilinear(buf);
  ASSERT_EQ(t.nodes(), 3u);
  EXPECT_EQ(t.lambda, 0.25);
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_TRUE(s.A[m] == t.A[m]);
    EXPECT_TRUE(bitwise_equal(s.a[m], t.a[m]));
    EXPECT_TRUE(bitwise_equal(s.b[m], t.b[m]));
  }
}

TEST(Bilinear, SerializationRejectsCorruptInput) {
  std::stringstream bad("NOTMAGIC0000000000000000");
  EXPECT_THROW(read_bilinear(bad), std::runtime_error);
  const BilinearSpec s = generate_bilinear_spec(3, 2, 1, LambdaMode::explicit_value(1.0));
  std::stringstream buf;
  write_bilinear(buf, s);
  std::string bytes = buf.str();
  bytes.resize(bytes.size() - 5);
  std::stringstream truncated(bytes);
  EXPECT_THROW(read_bilinear(truncated), std::runtime_error);
}

TEST(Problem, EvalChecksShapesAndNodes) {
  const VIProblem p = make_bilinear(3, 2, 1, LambdaMode::explicit_value(1.0));
  EXPECT_THROW(p.eval(Vector::Zero(5)), std::invalid_argument);
  EXPECT_THROW(p.eval_operator(2, Vector::Zero(6)), std::out_of_range);
  EXPECT_THROW(p.eval_component(0, 1, Vector::Zero(6)), std::out_of_range);
}

TEST(Problem, SingleComponentMatchesOperatorBitwise) {
  const VIProblem p = make_bilinear(4, 3, 2, LambdaMode::paper_rule());
  Rng rng = make_stream(1, Stream::kInitialPoint);
  Vector z(8);
  for (auto& x : z) x = standard_normal(rng);
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_TRUE(bitwise_equal(p.eval_component(m, 0, z), p.eval_operator(m, z)));
  }
}

TEST(Problem, AverageOfNodesIsGlobalOperator) {
  const VIProblem p = make_bilinear(5, 4, 3, LambdaMode::paper_rule());
  Vector z = Vector::LinSpaced(10, -1.0, 2.0);
  Vector sum = Vector::Zero(10);
  for (std::size_t m = 0; m < 4; ++m) sum += p.eval_operator(m, z);
  EXPECT_TRUE(bitwise_equal(sum / 4.0, p.eval(z)));
  EXPECT_LE((p.global_affine().apply(z) - p.eval(z)).norm(), 1e-12 * (1 + sum.norm()));
}

TEST(Problem, RowBlockSplitAveragesToNodeOperator) {
  const VIProblem p = make_bilinear(5, 3, 3, LambdaMode::paper_rule());
  const VIProblem s = split_row_blocks(p, 4);
  ASSERT_EQ(s.components_per_node(), 4u);
  Vector z = Vector::LinSpaced(10, 0.5, -1.5);
  for (std::size_t m = 0; m < 3; ++m) {
    Vector avg = Vector::Zero(10);
    for (std::size_t i = 0; i < 4; ++i) avg += s.eval_component(m, i, z);
    avg /= 4.0;
    EXPECT_LE((avg - p.eval_operator(m, z)).norm(), 1e-12 * (1 + avg.norm()));
    EXPECT_LE((s.eval_operator(m, z) - p.eval_operator(m, z)).norm(),
              1e-12 * (1 + avg.norm()));
  }
  EXPECT_GE(s.constants().L_hat, p.constants().L_tilde * (1 - 1e-12));
  EXPECT_THROW(split_row_blocks(p, 0), std::invalid_argument);
  EXPECT_THROW(split_row_blocks(p, 11), std::invalid_argument);
  EXPECT_THROW(split_row_blocks(s, 2), std::invalid_argument);
}

// Lipschitz constants are certified upper bounds and mu is a lower bound on
// the monotonicity modulus, probed on random pairs.
TEST(Problem, ConstantsBoundRandomPairs) {
  const VIProblem p = make_bilinear(6, 4, 11, LambdaMode::explicit_value(0.05));
  const Constants& c = p.constants();
  Rng rng = make_stream(3, Stream::kInitialPoint);
  auto draw = [&rng] {
    Vector v(12);
    for (auto& x : v) x = standard_normal(rng);
    return v;
  };
  for (int t = 0; t < 200; ++t) {
    const Vector x = draw();
    const Vector y = draw();
    const double dist = (x - y).norm();
    const Vector dF = p.eval(x) - p.eval(y);
    EXPECT_LE(dF.norm(), c.L * dist * (1 + 1e-10));
    EXPECT_GE(dF.dot(x - y), c.mu * dist * dist * (1 - 1e-10));
    for (std::size_t m = 0; m < 4; ++m) {
      const Vector dm = p.eval_operator(m, x) - p.eval_operator(m, y);
      EXPECT_LE(dm.norm(), c.L_m[m] * dist * (1 + 1e-10));
    }
  }
  EXPECT_LE(c.L, c.L_tilde * (1 + 1e-12));
  EXPECT_GE(c.L_max(), c.L_tilde);
}

TEST(Problem, RejectsWrongSolution) {
  std::vector<std::vector<AffineMap>> nodes(1);
  nodes[0].push_back({Matrix::Identity(2, 2), Vector::Zero(2)});
  EXPECT_THROW(make_affine_problem(nodes, Regime::kStronglyMonotone, 1.0, vec({1.0, 0.0})),
               std::domain_error);
}

TEST(Rotation, SolutionAndMonotonicity) {
  const Vector center = vec({1.0, -2.0, 0.5, 3.0});
  const VIProblem p = make_rotation(2, 4, 1e-3, center, 0.3, 5);
  EXPECT_EQ(p.constants().regime, Regime::kNonMonotoneMinty);
  EXPECT_LE(p.eval(center).norm(), 1e-12);
  const Vector x = vec({0.3, 0.1, -0.7, 2.0});
  const Vector y = vec({-1.0, 0.4, 0.2, 0.0});
  const double dist2 = (x - y).squaredNorm();
  EXPECT_NEAR((p.eval(x) - p.eval(y)).dot(x - y), 1e-3 * dist2, 1e-12);
  // Nodes differ, the average does not carry the perturbation.
  EXPECT_GT((p.eval_operator(0, x) - p.eval(x)).norm(), 1e-3);
}

TEST(Rotation, PureRotationPreservesNorm) {
  const VIProblem p = make_rotation(1, 1, 0.0, Vector::Zero(2));
  const Vector z = vec({3.0, 4.0});
  EXPECT_DOUBLE_EQ(p.eval(z).norm(), 5.0);
  EXPECT_DOUBLE_EQ(p.eval(z).dot(z), 0.0);
}

TEST(Regime, ParseRoundTrip) {
  for (Regime r : {Regime::kStronglyMonotone, Regime::kMonotone, Regime::kNonMonotoneMinty}) {
    EXPECT_EQ(parse_regime(to_string(r)), r);
  }
  EXPECT_EQ(parse_regime("sm"), Regime::kStronglyMonotone);
  EXPECT_EQ(parse_regime("minty"), Regime::kNonMonotoneMinty);
  EXPECT_THROW(parse_regime("convex"), std::invalid_argument);
}

}  // namespace
}  // namespace vicomp
