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

#include "vicomp/theory.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vicomp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw std::domain_error("tau must lie in (0, 1)");
  }
}

void check_tau_feedback(double tau) {
  check_tau(tau);
  if (tau < 0.75) {
    throw std::domain_error("τ ≥ 3/4 required for error-feedback methods");
  }
}

void check_mu(const TheoryInputs& in) {
  if (in.regime == Regime::kStronglyMonotone && !(in.constants.mu > 0.0)) {
    throw std::domain_error("strongly monotone bound needs mu > 0");
  }
}

double q_of(const TheoryInputs& in, std::size_t m) {
  return in.q_dev.empty() ? 1.0 : in.q_dev[m];
}

double q_max(const TheoryInputs& in) {
  double q = 1.0;
  for (double v : in.q_dev) q = std::max(q, v);
  return q;
}

double node_tilde(const TheoryInputs& in, std::size_t m) {
  const auto& c = in.constants;
  return c.L_m_tilde.empty() ? c.L_m[m] : c.L_m_tilde[m];
}

// Unbiased family: min[sqrt(1-tau)/(2C), (1-tau)/(2 mu)] (strongly
// monotone), sqrt(1-tau)/(2C + 4 Ltilde) (monotone), sqrt(1-tau)/(2C).
double unbiased_bound(const TheoryInputs& in, double c, double tau,
                      double safety) {
  check_tau(tau);
  check_mu(in);
  const double s = std::sqrt(1.0 - tau);
  double gamma = 0.0;
  switch (in.regime) {
    case Regime::kStronglyMonotone:
      gamma = std::min(s / (2.0 * c), (1.0 - tau) / (2.0 * in.constants.mu));
      break;
    case Regime::kMonotone:
      gamma = s / (2.0 * c + 4.0 * in.constants.L_tilde);
      break;
    case Regime::kNonMonotoneMinty:
      gamma = s / (2.0 * c);
      break;
  }
  return safety * gamma;
}

// Error-feedback family: min[(1-tau)/(8 mu), sqrt(1-tau)/denominator] in the
// strongly monotone case, the second term otherwise.
double feedback_bound(const TheoryInputs& in, double denominator, double tau,
                      double safety) {
  check_tau_feedback(tau);
  check_mu(in);
  double gamma = std::sqrt(1.0 - tau) / denominator;
  if (in.regime == Regime::kStronglyMonotone) {
    gamma = std::min(gamma, (1.0 - tau) / (8.0 * in.constants.mu));
  }
  return safety * gamma;
}

void check_safety(double safety) {
  if (!(safety > 0.0)) throw std::invalid_argument("safety factor must be > 0");
}

}  // namespace

void TheoryInputs::validate() const {
  if (M == 0) throw std::invalid_argument("theory: M must be >= 1");
  if (constants.L_m.size() != M) {
    throw std::invalid_argument("theory: need one L_m per device");
  }
  if (!q_dev.empty() && q_dev.size() != M) {
    throw std::invalid_argument("theory: need one q per device");
  }
  for (double q : q_dev) {
    if (!(q >= 1.0)) throw std::invalid_argument("theory: q must be >= 1");
  }
  if (!(q_serv >= 1.0 && delta_dev >= 1.0 && delta_serv >= 1.0 &&
        beta >= 1.0 && beta_serv >= 1.0)) {
    throw std::invalid_argument("theory: q, delta, beta must be >= 1");
  }
  if (constants.mu < 0.0) throw std::invalid_argument("theory: mu must be >= 0");
  if (r == 0) throw std::invalid_argument("theory: r must be >= 1");
  if (b > M) throw std::invalid_argument("theory: need b <= M");
}

TheoryInputs make_theory_inputs(const VIProblem& problem,
                                const CompressorSpec& device,
                                const CompressorSpec& server,
                                std::size_t participants) {
  TheoryInputs in;
  in.constants = problem.constants();
  in.M = problem.nodes();
  in.r = problem.components_per_node();
  in.b = participants;
  in.regime = in.constants.regime;
  const double dev = variance_param(device);
  const double serv = variance_param(server);
  if (device.unbiased()) {
    in.q_dev.assign(in.M, dev);
  } else {
    in.delta_dev = dev;
  }
  if (server.unbiased()) {
    in.q_serv = serv;
  } else {
    in.delta_serv = serv;
  }
  in.beta = expected_density(device);
  in.beta_serv = expected_density(server);
  in.validate();
  return in;
}

double cq(const TheoryInputs& in) {
  in.validate();
  const double Lt2 = in.constants.L_tilde * in.constants.L_tilde;
  const double M = static_cast<double>(in.M);
  double sum = 0.0;
  for (std::size_t m = 0; m < in.M; ++m) {
    const double lm = in.constants.L_m[m];
    sum += q_of(in, m) * lm * lm + (M - 1.0) * Lt2;
  }
  return std::sqrt(in.q_serv / (M * M) * sum);
}

double cq_tilde(const TheoryInputs& in) {
  in.validate();
  const double Lt2 = in.constants.L_tilde * in.constants.L_tilde;
  const double M = static_cast<double>(in.M);
  double sum = 0.0;
  for (std::size_t m = 0; m < in.M; ++m) {
    const double lm = node_tilde(in, m);
    sum += q_of(in, m) * lm * lm + (M - 1.0) * Lt2;
  }
  return std::sqrt(in.q_serv / (M * M) * sum);
}

double cq_partial(const TheoryInputs& in) {
  in.validate();
  const double Lt2 = in.constants.L_tilde * in.constants.L_tilde;
  const double M = static_cast<double>(in.M);
  const double b = static_cast<double>(in.participants());
  double sum = 0.0;
  for (std::size_t m = 0; m < in.M; ++m) {
    const double lm = node_tilde(in, m);
    sum += q_of(in, m) * lm * lm + (b - 1.0) * Lt2;
  }
  return std::sqrt(in.q_serv / (b * M) * sum);
}

double masha1_stepsize(const TheoryInputs& in, double tau, double safety) {
  check_safety(safety);
  return unbiased_bound(in, cq(in), tau, safety);
}

double vr_masha1_stepsize(const TheoryInputs& in, double tau, double safety) {
  check_safety(safety);
  return unbiased_bound(in, cq_tilde(in), tau, safety);
}

double pp_masha1_stepsize(const TheoryInputs& in, double tau, double safety) {
  check_safety(safety);
  return unbiased_bound(in, cq_partial(in), tau, safety);
}

double masha2_stepsize(const TheoryInputs& in, double tau, double safety) {
  check_safety(safety);
  in.validate();
  const double denominator =
      2.0 * in.constants.L + 165.0 * in.delta_serv * in.delta_dev * in.constants.L_tilde;
  return feedback_bound(in, denominator, tau, safety);
}

double vr_masha2_stepsize(const TheoryInputs& in, double tau, double safety) {
  check_safety(safety);
  in.validate();
  const double denominator =
      2.0 * in.constants.L + 165.0 * in.delta_serv * in.delta_dev * in.constants.L_hat;
  return feedback_bound(in, denominator, tau, safety);
}

double pp_masha2_stepsize(const TheoryInputs& in, double tau, double safety) {
  check_safety(safety);
  in.validate();
  const double ratio =
      static_cast<double>(in.M) / static_cast<double>(in.participants());
  const double denominator =
      (30.0 * in.delta_serv + 10.0 * in.delta_dev * ratio +
       165.0 * in.delta_dev * in.delta_serv * std::sqrt(ratio)) *
      in.constants.L_tilde;
  return feedback_bound(in, denominator, tau, safety);
}

double ceg_stepsize(const TheoryInputs& in, double safety) {
  check_safety(safety);
  in.validate();
  if (in.regime != Regime::kStronglyMonotone || !(in.constants.mu > 0.0)) {
    throw std::domain_error("compressed extragradient bound needs a strongly monotone problem");
  }
  const double L = in.constants.L_max();
  const double mu = in.constants.mu;
  const double q = q_max(in);
  const double M = static_cast<double>(in.M);
  return safety * std::min(mu / (48.0 * L * L) / (1.0 + q / M), 1.0 / (4.0 * mu));
}

double extragradient_stepsize(const TheoryInputs& in, double safety) {
  check_safety(safety);
  return safety / (2.0 * in.constants.L);
}

double theory_stepsize(Algorithm algorithm, const TheoryInputs& in, double tau,
                       double safety) {
  switch (algorithm) {
    case Algorithm::kMasha1:
      return masha1_stepsize(in, tau, safety);
    case Algorithm::kMasha2:
      return masha2_stepsize(in, tau, safety);
    case Algorithm::kVrMasha1:
      return vr_masha1_stepsize(in, tau, safety);
    case Algorithm::kVrMasha2:
      return vr_masha2_stepsize(in, tau, safety);
    case Algorithm::kPpMasha1:
      return pp_masha1_stepsize(in, tau, safety);
    case Algorithm::kPpMasha2:
      return pp_masha2_stepsize(in, tau, safety);
    case Algorithm::kCeg:
      return ceg_stepsize(in, safety);
    case Algorithm::kExtragradient:
      return extragradient_stepsize(in, safety);
    case Algorithm::kQsgdGda:
    case Algorithm::kEfGda:
      break;
  }
  throw std::invalid_argument("no step-size bound for " + to_string(algorithm) +
                              "; give gamma explicitly");
}

double ceg_noise_floor(const TheoryInputs& in, double gamma,
                       double sum_sq_solution_operators) {
  const double M = static_cast<double>(in.M);
  return 16.0 * q_max(in) * gamma * gamma / (M * M) * sum_sq_solution_operators;
}

double optimal_tau(Algorithm algorithm, double beta, std::size_t r,
                   std::size_t b, std::size_t M) {
  if (!(beta >= 1.0)) throw std::invalid_argument("beta must be >= 1");
  if (!is_anchored(algorithm)) {
    throw std::invalid_argument(to_string(algorithm) + " has no tau parameter");
  }
  double one_minus = 1.0 / beta;
  if (samples_components(algorithm)) {
    one_minus = 1.0 / std::max(beta, static_cast<double>(r));
  } else if (samples_participants(algorithm)) {
    const double bb = static_cast<double>(b == 0 ? M : b);
    one_minus = bb / (beta * static_cast<double>(M));
  }
  const double lower = uses_error_feedback(algorithm) ? 0.75 : 0.5;
  return std::clamp(1.0 - one_minus, lower, 1.0 - 1e-6);
}

double iteration_complexity(Algorithm algorithm, const TheoryInputs& in) {
  in.validate();
  const double L = in.constants.L_max();
  const double mu = in.constants.mu;
  const double q = q_max(in);
  const double beta = in.beta;
  const double delta = in.delta_dev;
  const double M = static_cast<double>(in.M);
  const double r = static_cast<double>(in.r);
  const double pb = static_cast<double>(in.participants());
  const double log_term = std::log(1.0 / in.epsilon);
  const double R2 = in.R0 * in.R0;
  const bool bidirectional = in.q_serv > 1.0 || in.delta_serv > 1.0;

  // offset + rate * L/mu log(1/eps); rate * L R^2 / eps; square * L^2 R^2 / eps^2.
  double offset = 0.0;
  double rate = kNaN;
  double square = kNaN;
  switch (algorithm) {
    case Algorithm::kMasha1:
    case Algorithm::kMasha2:
      offset = beta;
      if (algorithm == Algorithm::kMasha1) {
        square = bidirectional ? q * beta + q * q * beta / M : beta + q * beta / M;
        rate = std::sqrt(square);
      } else {
        const double dd = bidirectional ? delta * in.delta_serv : delta;
        rate = dd * std::sqrt(beta);
        square = dd * dd * beta;
      }
      break;
    case Algorithm::kVrMasha1:
      offset = beta + r;
      rate = std::sqrt(std::max(beta, r)) * std::sqrt(1.0 + q / M);
      square = std::max(beta, r) * (1.0 + q / M);
      break;
    case Algorithm::kVrMasha2:
      offset = beta + r;
      rate = std::sqrt(std::max(beta, r)) * delta;
      square = std::max(beta, r) * delta * delta;
      break;
    case Algorithm::kPpMasha1:
      offset = beta * M / pb;
      square = beta * M / pb + q * beta * M / pb;
      rate = std::sqrt(square);
      break;
    case Algorithm::kPpMasha2: {
      const double cube = M * M * M / (pb * pb * pb);
      offset = beta * M / pb;
      rate = delta * std::sqrt(beta * cube);
      square = delta * delta * beta * cube;
      break;
    }
    case Algorithm::kExtragradient:
      rate = 1.0;
      square = 1.0;
      break;
    case Algorithm::kCeg:
      if (in.regime != Regime::kStronglyMonotone || !(mu > 0.0)) return kNaN;
      return (1.0 + q / M) * (L * L) / (mu * mu) * log_term;
    case Algorithm::kQsgdGda:
    case Algorithm::kEfGda:
      return kNaN;
  }
  switch (in.regime) {
    case Regime::kStronglyMonotone:
      if (!(mu > 0.0)) return kNaN;
      return offset + rate * L / mu * log_term;
    case Regime::kMonotone:
      return rate * L * R2 / in.epsilon;
    case Regime::kNonMonotoneMinty:
      return square * L * L * R2 / (in.epsilon * in.epsilon);
  }
  return kNaN;
}

std::vector<BoundLine> stepsize_report(Algorithm algorithm,
                                       const TheoryInputs& in, double tau) {
  in.validate();
  std::vector<BoundLine> out;
  const std::string regime = to_string(in.regime);
  auto add = [&out](std::string name, std::string source, double value,
                    std::string note = {}) {
    out.push_back({std::move(name), std::move(source), value, std::move(note)});
  };
  switch (algorithm) {
    case Algorithm::kMasha1:
      add("C_q", "MASHA1 theorem constant", cq(in));
      add("gamma_max", "MASHA1 theorem, " + regime, masha1_stepsize(in, tau));
      break;
    case Algorithm::kVrMasha1:
      add("C_q_tilde", "VR-MASHA1 theorem constant", cq_tilde(in));
      add("gamma_max", "VR-MASHA1 theorem, " + regime, vr_masha1_stepsize(in, tau));
      break;
    case Algorithm::kPpMasha1:
      add("C_q_b", "PP-MASHA1 theorem constant", cq_partial(in));
      add("gamma_max", "PP-MASHA1 theorem, " + regime, pp_masha1_stepsize(in, tau));
      break;
    case Algorithm::kMasha2:
      add("gamma_max", "MASHA2 theorem, " + regime, masha2_stepsize(in, tau));
      break;
    case Algorithm::kVrMasha2:
      add("gamma_max", "VR-MASHA2 theorem, " + regime, vr_masha2_stepsize(in, tau));
      break;
    case Algorithm::kPpMasha2:
      add("gamma_max", "PP-MASHA2 theorem, " + regime, pp_masha2_stepsize(in, tau));
      break;
    case Algorithm::kCeg:
      add("gamma_max", "CEG theorem, strongly_monotone", ceg_stepsize(in));
      break;
    case Algorithm::kExtragradient:
      add("gamma_max", "extragradient, 1/(2L)", extragradient_stepsize(in));
      break;
    case Algorithm::kQsgdGda:
    case Algorithm::kEfGda:
      add("gamma_max", "none", kNaN, "no bound is available for this method");
      break;
  }
  if (is_anchored(algorithm)) {
    std::size_t M = in.M;
    add("tau_optimal", "optimal tau rule",
        optimal_tau(algorithm, in.beta, in.r, in.b, M));
  }
  add("iterations", "iteration complexity, unit constants",
      iteration_complexity(algorithm, in), "order of magnitude only");
  return out;
}

}  // namespace vicomp
