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

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include "vicomp/problem.h"
#include "vicomp/rng.h"

namespace vicomp {

namespace {

constexpr std::array<char, 8> kMagic = {'V', 'I', 'C', 'B', 'L', 'N', '0', '1'};
constexpr double kMaxCondition = 1e14;

void check_spec(const BilinearSpec& spec) {
  if (spec.A.empty()) throw std::invalid_argument("bilinear: need M >= 1");
  const std::size_t d = spec.half_dim();
  if (d == 0) throw std::invalid_argument("bilinear: need d >= 1");
  if (spec.a.size() != spec.A.size() || spec.b.size() != spec.A.size()) {
    throw std::invalid_argument("bilinear: a, b must have one entry per node");
  }
  for (std::size_t m = 0; m < spec.nodes(); ++m) {
    if (static_cast<std::size_t>(spec.A[m].rows()) != d ||
        static_cast<std::size_t>(spec.A[m].cols()) != d ||
        static_cast<std::size_t>(spec.a[m].size()) != d ||
        static_cast<std::size_t>(spec.b[m].size()) != d) {
      throw std::invalid_argument("bilinear: inconsistent shapes at node " +
                                  std::to_string(m));
    }
  }
  if (!(spec.lambda >= 0.0) || !std::isfinite(spec.lambda)) {
    throw std::invalid_argument("bilinear: lambda must be finite and >= 0");
  }
}

AffineMap node_map(const Matrix& A, const Vector& a, const Vector& b,
                   double lambda) {
  const auto d = A.rows();
  AffineMap map{Matrix::Zero(2 * d, 2 * d), Vector(2 * d)};
  map.B.topLeftCorner(d, d).diagonal().setConstant(lambda);
  map.B.bottomRightCorner(d, d).diagonal().setConstant(lambda);
  map.B.topRightCorner(d, d) = A;
  map.B.bottomLeftCorner(d, d) = -A.transpose();
  map.c.head(d) = a;
  map.c.tail(d) = -b;
  return map;
}

// F_m(z) = [A y + a + lambda x; -A^T x - b + lambda y], evaluated blockwise.
ComponentFn node_fn(Matrix A, Vector a, Vector b, double lambda) {
  return [A = std::move(A), a = std::move(a), b = std::move(b),
          lambda](const Vector& z, Vector& out) {
    const auto d = A.rows();
    out.resize(2 * d);
    auto x = z.head(d);
    auto y = z.tail(d);
    out.head(d).noalias() = A * y;
    out.head(d) += a + lambda * x;
    out.tail(d).noalias() = -(A.transpose() * x);
    out.tail(d) += lambda * y - b;
  };
}

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little,
                "serialization assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("bilinear file truncated");
  return value;
}

}  // namespace

BilinearSpec generate_bilinear_spec(std::size_t d, std::size_t M,
                                    std::uint64_t seed, LambdaMode mode) {
  if (d == 0 || M == 0) {
    throw std::invalid_argument("make_bilinear: need d >= 1 and M >= 1");
  }
  if (mode.kind == LambdaMode::Kind::kExplicit &&
      !(mode.value >= 0.0 && std::isfinite(mode.value))) {
    throw std::invalid_argument("make_bilinear: lambda must be >= 0");
  }
  BilinearSpec spec;
  const auto n = static_cast<Eigen::Index>(d);
  for (std::size_t m = 0; m < M; ++m) {
    Rng rng = make_stream(seed, Stream::kProblem, {m});
    Matrix B(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) B(i, j) = standard_normal(rng);
    }
    Matrix A = B.transpose() * B;
    A.diagonal().array() += kBilinearRidge;
    // Exact symmetry regardless of the BLAS summation order.
    A = 0.5 * (A + A.transpose()).eval();
    Vector a(n);
    Vector b(n);
    for (Eigen::Index i = 0; i < n; ++i) a[i] = uniform(rng, -1.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) b[i] = uniform(rng, -1.0, 1.0);
    spec.A.push_back(std::move(A));
    spec.a.push_back(std::move(a));
    spec.b.push_back(std::move(b));
  }
  if (mode.kind == LambdaMode::Kind::kPaperRule) {
    double max_norm = 0.0;
    for (const Matrix& A : spec.A) {
      max_norm = std::max(max_norm,
                          spectral_norm(A, certified_norm_options()).value);
    }
    spec.lambda = max_norm / kPaperLambdaDivisor;
  } else {
    spec.lambda = mode.value;
  }
  return spec;
}

Vector exact_solution_bilinear(const BilinearSpec& spec) {
  check_spec(spec);
  const auto d = static_cast<Eigen::Index>(spec.half_dim());
  Matrix A_bar = Matrix::Zero(d, d);
  Vector a_bar = Vector::Zero(d);
  Vector b_bar = Vector::Zero(d);
  for (std::size_t m = 0; m < spec.nodes(); ++m) {
    A_bar += spec.A[m];
    a_bar += spec.a[m];
    b_bar += spec.b[m];
  }
  const double inv_m = 1.0 / static_cast<double>(spec.nodes());
  A_bar *= inv_m;
  a_bar *= inv_m;
  b_bar *= inv_m;
  const AffineMap global = node_map(A_bar, a_bar, b_bar, spec.lambda);

  Eigen::JacobiSVD<Matrix> svd(global.B);
  const auto& s = svd.singularValues();
  const double smax = s[0];
  const double smin = s[s.size() - 1];
  if (!(smin > 0.0) || smax / smin > kMaxCondition) {
    throw std::domain_error(
        "bilinear: operator is singular or ill-conditioned (condition " +
        std::to_string(smin > 0.0 ? smax / smin
                                  : std::numeric_limits<double>::infinity()) +
        ")");
  }
  Vector z = global.B.partialPivLu().solve(-global.c);
  // One step of iterative refinement keeps the residual near machine level.
  const Vector residual = global.B * z + global.c;
  z -= global.B.partialPivLu().solve(residual);
  return z;
}

VIProblem make_bilinear(const BilinearSpec& spec) {
  check_spec(spec);
  const std::size_t M = spec.nodes();
  const std::size_t d = spec.half_dim();
  const auto norm_options = certified_norm_options();

  Constants constants;
  constants.mu = spec.lambda;
  constants.regime =
      spec.lambda > 0.0 ? Regime::kStronglyMonotone : Regime::kMonotone;
  std::vector<std::vector<ComponentFn>> fns(M);
  std::vector<std::vector<AffineMap>> maps(M);
  Matrix A_bar = Matrix::Zero(d, d);
  double sum_sq = 0.0;
  for (std::size_t m = 0; m < M; ++m) {
    const double lm = spectral_norm(spec.A[m], norm_options).value + spec.lambda;
    constants.L_m.push_back(lm);
    constants.L_m_tilde.push_back(lm);
    sum_sq += lm * lm;
    A_bar += spec.A[m];
    fns[m].push_back(node_fn(spec.A[m], spec.a[m], spec.b[m], spec.lambda));
    maps[m].push_back(node_map(spec.A[m], spec.a[m], spec.b[m], spec.lambda));
  }
  A_bar /= static_cast<double>(M);
  constants.L = spectral_norm(A_bar, norm_options).value + spec.lambda;
  constants.L_tilde = std::sqrt(sum_sq / static_cast<double>(M));
  constants.L_hat = constants.L_tilde;

  return VIProblem(2 * d, std::move(fns), std::move(constants),
                   exact_solution_bilinear(spec), std::move(maps));
}

VIProblem make_bilinear(std::size_t d, std::size_t M, std::uint64_t seed,
                        LambdaMode mode) {
  return make_bilinear(generate_bilinear_spec(d, M, seed, mode));
}

// Layout (little endian): 8-byte magic "VICBLN01", u32 d, u32 M, f64 lambda,
// then per node: A (d*d f64, row-major), a (d f64), b (d f64).
void write_bilinear(std::ostream& out, const BilinearSpec& spec) {
  check_spec(spec);
  out.write(kMagic.data(), kMagic.size());
  const std::size_t d = spec.half_dim();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(spec.nodes()));
  put<double>(out, spec.lambda);
  for (std::size_t m = 0; m < spec.nodes(); ++m) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) put<double>(out, spec.A[m](i, j));
    }
    for (std::size_t i = 0; i < d; ++i) put<double>(out, spec.a[m][i]);
    for (std::size_t i = 0; i < d; ++i) put<double>(out, spec.b[m][i]);
  }
  if (!out) throw std::runtime_error("failed to write bilinear instance");
}

BilinearSpec read_bilinear(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) {
    throw std::runtime_error("not a bilinear instance file (bad magic)");
  }
  const std::size_t d = get<std::uint32_t>(in);
  const std::size_t M = get<std::uint32_t>(in);
  if (d == 0 || M == 0) throw std::runtime_error("bilinear file: empty shape");
  BilinearSpec spec;
  spec.lambda = get<double>(in);
  const auto n = static_cast<Eigen::Index>(d);
  for (std::size_t m = 0; m < M; ++m) {
    Matrix A(n, n);
    Vector a(n);
    Vector b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) A(i, j) = get<double>(in);
    }
    for (Eigen::Index i = 0; i < n; ++i) a[i] = get<double>(in);
    for (Eigen::Index i = 0; i < n; ++i) b[i] = get<double>(in);
    spec.A.push_back(std::move(A));
    spec.a.push_back(std::move(a));
    spec.b.push_back(std::move(b));
  }
  check_spec(spec);
  return spec;
}

void save_bilinear(const std::string& path, const BilinearSpec& spec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_bilinear(out, spec);
}

BilinearSpec load_bilinear(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_bilinear(in);
}

}  // namespace vicomp
