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

#include "vicomp/experiment.h"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "vicomp/theory.h"

namespace vicomp {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) throw ConfigError(message);
  throw ConfigError("line " + std::to_string(mark.line + 1) + ", column " +
                    std::to_string(mark.column + 1) + ": " + message);
}

void check_keys(const YAML::Node& node, const std::string& section,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(node, "'" + section + "' must be a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      fail(kv.first, "unknown key '" + key + "' in '" + section + "'");
    }
  }
}

template <typename T>
T read(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, "'" + field + "' must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, "'" + field + "' has an invalid value '" + node.Scalar() + "'");
  }
}

std::size_t read_count(const YAML::Node& node, const std::string& field,
                       std::size_t min_value) {
  const auto v = read<long long>(node, field);
  if (v < static_cast<long long>(min_value)) {
    fail(node, "'" + field + "' must be >= " + std::to_string(min_value));
  }
  return static_cast<std::size_t>(v);
}

double read_positive(const YAML::Node& node, const std::string& field) {
  const double v = read<double>(node, field);
  if (!(v > 0.0) || !std::isfinite(v)) fail(node, "'" + field + "' must be > 0");
  return v;
}

std::vector<double> read_list(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence()) fail(node, "'" + field + "' must be a list");
  std::vector<double> out;
  for (const auto& item : node) out.push_back(read<double>(item, field));
  return out;
}

ProblemConfig parse_problem(const YAML::Node& node) {
  check_keys(node, "problem",
             {"kind", "d", "nodes", "seed", "lambda", "r", "path", "pairs",
              "eps", "heterogeneity", "center"});
  ProblemConfig p;
  if (node["kind"]) p.kind = read<std::string>(node["kind"], "kind");
  if (p.kind != "bilinear" && p.kind != "bilinear_file" && p.kind != "rotation") {
    fail(node["kind"], "problem kind must be bilinear, bilinear_file or rotation");
  }
  if (node["d"]) p.d = read_count(node["d"], "d", 1);
  if (node["nodes"]) p.nodes = read_count(node["nodes"], "nodes", 1);
  if (node["seed"]) p.seed = read<std::uint64_t>(node["seed"], "seed");
  if (node["lambda"]) {
    const YAML::Node& l = node["lambda"];
    if (l.IsScalar() && l.Scalar() == "paper") {
      p.lambda = LambdaMode::paper_rule();
    } else {
      const double v = read<double>(l, "lambda");
      if (!(v >= 0.0)) fail(l, "'lambda' must be >= 0 or 'paper'");
      p.lambda = LambdaMode::explicit_value(v);
    }
  }
  if (node["r"]) p.r = read_count(node["r"], "r", 1);
  if (node["path"]) p.path = read<std::string>(node["path"], "path");
  if (node["pairs"]) p.pairs = read_count(node["pairs"], "pairs", 1);
  if (node["eps"]) p.eps = read<double>(node["eps"], "eps");
  if (node["heterogeneity"]) {
    p.heterogeneity = read<double>(node["heterogeneity"], "heterogeneity");
  }
  if (node["center"]) {
    p.center = read_list(node["center"], "center");
    if (p.kind == "rotation" && p.center.size() != 2 * p.pairs) {
      fail(node["center"], "'center' must have 2 * pairs entries");
    }
  }
  if (p.kind == "bilinear_file" && p.path.empty()) {
    fail(node, "bilinear_file needs 'path'");
  }
  return p;
}

AlgorithmEntry parse_entry(const YAML::Node& node) {
  check_keys(node, "algorithms",
             {"name", "label", "compressor", "server_compressor", "gamma",
              "safety", "tau", "participants", "w_update"});
  AlgorithmEntry e;
  if (!node["name"]) fail(node, "algorithm entry needs 'name'");
  try {
    e.algorithm = parse_algorithm(read<std::string>(node["name"], "name"));
  } catch (const std::invalid_argument& err) {
    fail(node["name"], err.what());
  }
  e.label = node["label"] ? read<std::string>(node["label"], "label")
                          : to_string(e.algorithm);
  if (node["compressor"]) e.compressor = read<std::string>(node["compressor"], "compressor");
  if (node["server_compressor"]) {
    e.server_compressor = read<std::string>(node["server_compressor"], "server_compressor");
  }
  if (node["gamma"]) {
    const YAML::Node& g = node["gamma"];
    if (!(g.IsScalar() && g.Scalar() == "theory")) e.gamma = read_positive(g, "gamma");
  }
  if (node["safety"]) e.safety = read_positive(node["safety"], "safety");
  if (node["tau"]) {
    const YAML::Node& t = node["tau"];
    if (!(t.IsScalar() && t.Scalar() == "optimal")) {
      const double v = read<double>(t, "tau");
      if (!(v > 0.0 && v < 1.0)) fail(t, "'tau' must lie in (0, 1)");
      e.tau = v;
    }
  }
  if (node["participants"]) {
    e.participants = read_count(node["participants"], "participants", 1);
  }
  if (node["w_update"]) {
    try {
      e.w_update = parse_w_update(read<std::string>(node["w_update"], "w_update"));
    } catch (const std::invalid_argument& err) {
      fail(node["w_update"], err.what());
    }
  }
  return e;
}

ExperimentConfig parse_root(const YAML::Node& root) {
  if (!root.IsMap()) throw ConfigError("config must be a mapping");
  check_keys(root, "config", {"problem", "run", "algorithms", "sweep"});
  ExperimentConfig c;
  if (root["problem"]) c.problem = parse_problem(root["problem"]);
  if (const YAML::Node run = root["run"]) {
    check_keys(run, "run",
               {"iterations", "metric_every", "seeds", "seed", "budget_bits",
                "gap", "gap_every", "gap_restarts", "gap_iterations",
                "gap_radius", "ledger", "initial_point"});
    if (run["iterations"]) c.iterations = read_count(run["iterations"], "iterations", 0);
    if (run["metric_every"]) c.metric_every = read_count(run["metric_every"], "metric_every", 1);
    if (run["seeds"]) c.seeds = read_count(run["seeds"], "seeds", 1);
    if (run["seed"]) c.base_seed = read<std::uint64_t>(run["seed"], "seed");
    if (run["budget_bits"]) c.budget_bits = read<std::uint64_t>(run["budget_bits"], "budget_bits");
    if (run["gap"]) c.gap = read<bool>(run["gap"], "gap");
    if (run["gap_every"]) c.gap_every = read_count(run["gap_every"], "gap_every", 0);
    if (run["gap_restarts"]) {
      c.gap_options.restarts = read_count(run["gap_restarts"], "gap_restarts", 0);
    }
    if (run["gap_iterations"]) {
      c.gap_options.iterations = read_count(run["gap_iterations"], "gap_iterations", 1);
    }
    if (run["gap_radius"]) c.gap_options.radius = read_positive(run["gap_radius"], "gap_radius");
    if (run["ledger"]) c.ledger_csv = read<bool>(run["ledger"], "ledger");
    if (const YAML::Node init = run["initial_point"]) {
      const std::string v = read<std::string>(init, "initial_point");
      if (v == "zero") {
        c.initial_point = InitialPoint::kZero;
      } else if (v == "normal") {
        c.initial_point = InitialPoint::kNormal;
      } else {
        fail(init, "'initial_point' must be zero or normal");
      }
    }
  }
  const YAML::Node algos = root["algorithms"];
  if (!algos || !algos.IsSequence() || algos.size() == 0) {
    if (algos) fail(algos, "'algorithms' must be a non-empty list");
    throw ConfigError("config needs a non-empty 'algorithms' list");
  }
  std::set<std::string> labels;
  for (const auto& item : algos) {
    AlgorithmEntry e = parse_entry(item);
    if (!labels.insert(e.label).second) {
      fail(item, "duplicate algorithm label '" + e.label + "'");
    }
    c.algorithms.push_back(std::move(e));
  }
  if (const YAML::Node sweep = root["sweep"]) {
    check_keys(sweep, "sweep", {"grid", "scale"});
    if (sweep["grid"]) {
      c.sweep_grid = read_list(sweep["grid"], "grid");
      for (double g : c.sweep_grid) {
        if (!(g > 0.0)) fail(sweep["grid"], "sweep grid values must be > 0");
      }
    }
    if (sweep["scale"]) {
      c.sweep_scale = read_list(sweep["scale"], "scale");
      for (double g : c.sweep_scale) {
        if (!(g > 0.0)) fail(sweep["scale"], "sweep scale values must be > 0");
      }
    }
  }
  return c;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir + "': " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

MetricOptions metric_options(const ExperimentConfig& config,
                             const VIProblem& problem, const Vector& z0) {
  MetricOptions m;
  m.distance = problem.solution().has_value();
  m.op_norm = true;
  m.gap = config.gap;
  m.gap_every = config.gap_every;
  m.gap_options = config.gap_options;
  if (!(m.gap_options.radius > 0.0)) {
    m.gap_options.radius = default_gap_radius(problem, z0);
  }
  return m;
}

double final_value(const RunReport& report, double MetricSample::*field) {
  if (report.status != RunStatus::kOk || report.samples.empty()) {
    return std::numeric_limits<double>::infinity();
  }
  return report.samples.back().*field;
}

// Metric used to rank step sizes: distance when the solution is known,
// otherwise ||F(w)||^2.
double ranking_value(const RunReport& report, const VIProblem& problem) {
  return final_value(report, problem.solution() ? &MetricSample::dist_sq
                                                : &MetricSample::op_norm_sq);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string file_stem(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) {
      c = '_';
    }
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ", column " +
                      std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  return parse_root(root);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

VIProblem build_problem(const ProblemConfig& p) {
  VIProblem problem = [&] {
    if (p.kind == "bilinear") return make_bilinear(p.d, p.nodes, p.seed, p.lambda);
    if (p.kind == "bilinear_file") {
      BilinearSpec spec = load_bilinear(p.path);
      return make_bilinear(spec);
    }
    if (p.kind == "rotation") {
      Vector center = Vector::Zero(2 * p.pairs);
      for (std::size_t i = 0; i < p.center.size(); ++i) center[i] = p.center[i];
      return make_rotation(p.pairs, p.nodes, p.eps, center, p.heterogeneity, p.seed);
    }
    throw ConfigError("unknown problem kind '" + p.kind + "'");
  }();
  if (p.r > 1) return split_row_blocks(problem, p.r);
  return problem;
}

Vector make_initial_point(const ExperimentConfig& config, const VIProblem& problem) {
  Vector z0 = Vector::Zero(problem.dim());
  if (config.initial_point == InitialPoint::kNormal) {
    Rng rng = make_stream(config.problem.seed, Stream::kInitialPoint);
    for (Eigen::Index i = 0; i < z0.size(); ++i) z0[i] = standard_normal(rng);
  }
  return z0;
}

ResolvedRun resolve(const AlgorithmEntry& entry, const VIProblem& problem,
                    const ExperimentConfig& config, std::uint64_t seed) {
  ResolvedRun out;
  out.label = entry.label.empty() ? to_string(entry.algorithm) : entry.label;
  const std::size_t d = problem.dim();
  try {
    out.device = parse_compressor(entry.compressor, d);
    out.server = parse_compressor(entry.server_compressor, d);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(out.label + ": " + e.what());
  }
  if (entry.participants > problem.nodes()) {
    throw ConfigError(out.label + ": participants exceed the number of nodes");
  }
  AlgoConfig& a = out.algo;
  a.algorithm = entry.algorithm;
  a.iterations = config.iterations;
  a.metric_every = config.metric_every;
  a.participants = entry.participants;
  a.w_update = entry.w_update;
  a.seed = seed;
  a.uplink_budget_bits = config.budget_bits;
  if (entry.tau) {
    a.tau = *entry.tau;
  } else if (is_anchored(entry.algorithm)) {
    a.tau = optimal_tau(entry.algorithm, expected_density(out.device),
                        problem.components_per_node(), entry.participants,
                        problem.nodes());
  }
  if (entry.gamma) {
    a.gamma = *entry.gamma;
  } else {
    const TheoryInputs in =
        make_theory_inputs(problem, out.device, out.server, entry.participants);
    try {
      a.gamma = theory_stepsize(entry.algorithm, in, a.tau, entry.safety);
    } catch (const std::exception& e) {
      throw ConfigError(out.label + ": " + e.what());
    }
  }
  return out;
}

RunReport execute(const VIProblem& problem, const ResolvedRun& resolved,
                  const ExperimentConfig& config, CommLedger* ledger) {
  Network net(std::vector<CompressorSpec>(problem.nodes(), resolved.device),
              resolved.server, resolved.algo.seed);
  const Vector z0 = make_initial_point(config, problem);
  RunReport report = run(problem, resolved.algo, net, z0,
                         metric_options(config, problem, z0));
  if (ledger) *ledger = net.ledger();
  return report;
}

std::vector<MetricSample> mean_samples(
    const std::vector<std::vector<MetricSample>>& per_seed) {
  std::size_t rows = 0;
  for (const auto& s : per_seed) rows = std::max(rows, s.size());
  std::vector<MetricSample> out(rows);
  const double nan = MetricSample::kMissing;
  for (std::size_t i = 0; i < rows; ++i) {
    MetricSample& m = out[i];
    bool complete = true;
    std::uint64_t iter = 0;
    bool have_iter = false;
    for (const auto& s : per_seed) {
      if (i >= s.size()) {
        complete = false;
        continue;
      }
      if (have_iter && s[i].iter != iter) complete = false;
      iter = s[i].iter;
      have_iter = true;
    }
    m.iter = iter;
    if (!complete) {
      m.dist_sq = m.dist_sq_w = m.gap_est = m.op_norm_sq = nan;
      continue;
    }
    const double n = static_cast<double>(per_seed.size());
    double up = 0, down = 0, syncs = 0, dist = 0, dist_w = 0, gap = 0, op = 0;
    for (const auto& s : per_seed) {
      up += static_cast<double>(s[i].cum_bits_up);
      down += static_cast<double>(s[i].cum_bits_down);
      syncs += static_cast<double>(s[i].full_syncs);
      dist += s[i].dist_sq;
      dist_w += s[i].dist_sq_w;
      gap += s[i].gap_est;
      op += s[i].op_norm_sq;
    }
    m.cum_bits_up = static_cast<std::uint64_t>(std::llround(up / n));
    m.cum_bits_down = static_cast<std::uint64_t>(std::llround(down / n));
    m.full_syncs = static_cast<std::uint64_t>(std::llround(syncs / n));
    m.dist_sq = dist / n;
    m.dist_sq_w = dist_w / n;
    m.gap_est = gap / n;
    m.op_norm_sq = op / n;
  }
  return out;
}

int cmd_run(const ExperimentConfig& config, const std::string& out_dir,
            std::ostream& log) {
  const VIProblem problem = build_problem(config.problem);
  ensure_dir(out_dir);
  std::vector<ResolvedRun> resolved;
  for (const AlgorithmEntry& entry : config.algorithms) {
    resolved.push_back(resolve(entry, problem, config, config.base_seed));
  }
  std::ofstream summary = open_out(fs::path(out_dir) / "summary.csv");
  summary << "label,algorithm,seed,status,gamma,tau,iterations,final_dist_sq,"
             "final_gap_est,final_op_norm_sq,bits_up,bits_down,full_syncs\n";
  for (ResolvedRun& r : resolved) {
    std::vector<std::vector<MetricSample>> per_seed;
    const std::string stem = file_stem(r.label);
    for (std::size_t s = 0; s < config.seeds; ++s) {
      r.algo.seed = config.base_seed + s;
      CommLedger ledger(problem.nodes());
      const RunReport report = execute(problem, r, config, &ledger);
      {
        std::ofstream out = open_out(fs::path(out_dir) /
                                     (stem + "_seed" + std::to_string(r.algo.seed) + ".csv"));
        write_report_csv(out, report.samples);
      }
      if (config.ledger_csv) {
        std::ofstream out = open_out(
            fs::path(out_dir) /
            (stem + "_seed" + std::to_string(r.algo.seed) + "_ledger.csv"));
        ledger.write_csv(out);
      }
      const MetricSample& last = report.samples.back();
      summary << r.label << ',' << to_string(r.algo.algorithm) << ','
              << r.algo.seed << ',' << to_string(report.status) << ','
              << format_number(r.algo.gamma) << ','
              << format_number(is_anchored(r.algo.algorithm) ? r.algo.tau
                                                             : MetricSample::kMissing)
              << ',' << report.iterations_done << ','
              << format_number(last.dist_sq) << ',' << format_number(last.gap_est)
              << ',' << format_number(last.op_norm_sq) << ','
              << last.cum_bits_up << ',' << last.cum_bits_down << ','
              << last.full_syncs << '\n';
      log << r.label << " seed " << r.algo.seed << ": " << to_string(report.status)
          << ", " << report.iterations_done << " iterations, final dist_sq "
          << format_number(last.dist_sq) << '\n';
      if (report.status == RunStatus::kDiverged) log << "  " << report.diagnostic << '\n';
      per_seed.push_back(report.samples);
    }
    std::ofstream mean = open_out(fs::path(out_dir) / (stem + "_mean.csv"));
    write_report_csv(mean, mean_samples(per_seed));
  }
  return 0;
}

int cmd_sweep(const ExperimentConfig& config, const std::string& out_dir,
              std::ostream& log) {
  if (config.sweep_grid.empty() && config.sweep_scale.empty()) {
    throw ConfigError("sweep needs a non-empty 'sweep.grid' or 'sweep.scale'");
  }
  const VIProblem problem = build_problem(config.problem);
  ensure_dir(out_dir);
  std::ofstream table = open_out(fs::path(out_dir) / "sweep.csv");
  table << "label,gamma,mean_final,diverged_seeds\n";
  std::ofstream best_out = open_out(fs::path(out_dir) / "best.csv");
  best_out << "label,best_gamma,mean_final\n";
  for (const AlgorithmEntry& entry : config.algorithms) {
    std::vector<double> grid = config.sweep_grid;
    if (grid.empty()) {
      AlgorithmEntry theory = entry;
      theory.gamma.reset();
      const double base = resolve(theory, problem, config, config.base_seed).algo.gamma;
      for (double s : config.sweep_scale) grid.push_back(s * base);
    }
    double best_gamma = grid.front();
    double best_value = std::numeric_limits<double>::infinity();
    bool have_best = false;
    for (double gamma : grid) {
      AlgorithmEntry fixed = entry;
      fixed.gamma = gamma;
      ResolvedRun r = resolve(fixed, problem, config, config.base_seed);
      double total = 0.0;
      std::size_t diverged = 0;
      for (std::size_t s = 0; s < config.seeds; ++s) {
        r.algo.seed = config.base_seed + s;
        const RunReport report = execute(problem, r, config);
        if (report.status == RunStatus::kDiverged) ++diverged;
        total += ranking_value(report, problem);
      }
      const double mean = total / static_cast<double>(config.seeds);
      table << r.label << ',' << format_number(gamma) << ',' << format_number(mean)
            << ',' << diverged << '\n';
      log << r.label << " gamma " << format_number(gamma) << ": "
          << format_number(mean) << '\n';
      if (!have_best || mean < best_value) {
        best_value = mean;
        best_gamma = gamma;
        have_best = true;
      }
    }
    best_out << entry.label << ',' << format_number(best_gamma) << ','
             << format_number(best_value) << '\n';
    log << entry.label << " best gamma " << format_number(best_gamma) << '\n';
  }
  return 0;
}

int cmd_check_stepsize(const ExperimentConfig& config, std::ostream& out) {
  const VIProblem problem = build_problem(config.problem);
  const Constants& c = problem.constants();
  out << "problem: dim " << problem.dim() << ", nodes " << problem.nodes()
      << ", r " << problem.components_per_node() << ", regime "
      << to_string(c.regime) << '\n';
  out << "  L " << format_number(c.L) << ", L_tilde " << format_number(c.L_tilde)
      << ", L_hat " << format_number(c.L_hat) << ", L_max "
      << format_number(c.L_max()) << ", mu " << format_number(c.mu) << '\n';
  int status = 0;
  for (const AlgorithmEntry& entry : config.algorithms) {
    const std::size_t d = problem.dim();
    CompressorSpec dev;
    CompressorSpec serv;
    try {
      dev = parse_compressor(entry.compressor, d);
      serv = parse_compressor(entry.server_compressor, d);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(entry.label + ": " + e.what());
    }
    TheoryInputs in = make_theory_inputs(problem, dev, serv, entry.participants);
    in.epsilon = 1e-6;
    if (problem.solution()) in.R0 = problem.solution()->norm();
    double tau = 0.5;
    if (entry.tau) {
      tau = *entry.tau;
    } else if (is_anchored(entry.algorithm)) {
      tau = optimal_tau(entry.algorithm, in.beta, in.r, entry.participants, in.M);
    }
    out << entry.label << " (" << to_string(entry.algorithm) << ", "
        << describe(dev) << " / " << describe(serv);
    if (is_anchored(entry.algorithm)) out << ", tau " << format_number(tau);
    out << ")\n";
    try {
      for (const BoundLine& line : stepsize_report(entry.algorithm, in, tau)) {
        out << "  " << std::left << std::setw(12) << line.name << ' '
            << format_number(line.value) << "  [" << line.source << ']';
        if (!line.note.empty()) out << "  " << line.note;
        out << '\n';
      }
    } catch (const std::domain_error& e) {
      out << "  refused: " << e.what() << '\n';
      status = 1;
    }
  }
  return status;
}

ExperimentConfig figure1_config(const CompareOptions& o) {
  ExperimentConfig c;
  c.problem.kind = "bilinear";
  c.problem.d = o.d;
  c.problem.nodes = o.nodes;
  c.problem.seed = o.problem_seed;
  c.problem.lambda = LambdaMode::paper_rule();
  c.seeds = o.seeds;
  c.iterations = o.max_iterations;
  c.metric_every = o.metric_every;
  c.budget_bits = o.budget_bits;
  c.initial_point = InitialPoint::kNormal;
  auto add = [&c](Algorithm a, const std::string& label, const std::string& comp) {
    AlgorithmEntry e;
    e.algorithm = a;
    e.label = label;
    e.compressor = comp;
    c.algorithms.push_back(e);
  };
  add(Algorithm::kMasha1, "masha1_rand30", "rand:30%");
  add(Algorithm::kMasha2, "masha2_top30", "top:30%");
  add(Algorithm::kCeg, "ceg_rand30", "rand:30%");
  add(Algorithm::kQsgdGda, "qsgd_rand30", "rand:30%");
  add(Algorithm::kEfGda, "ef_top30", "top:30%");
  return c;
}

CompareResult run_compare(const CompareOptions& options, std::ostream& log) {
  CompareOptions o = options;
  if (o.budget_bits == 0) o.budget_bits = kFigure1BudgetBits;
  if (o.max_iterations == 0) o.max_iterations = kFigure1MaxIterations;
  if (o.metric_every == 0) o.metric_every = kFigure1MetricEvery;
  if (o.seeds == 0) throw ConfigError("compare needs at least one seed");
  if (o.grid_low > o.grid_high) throw ConfigError("compare grid is empty");
  const ExperimentConfig config = figure1_config(o);
  const VIProblem problem = build_problem(config.problem);

  CompareResult result;
  result.anchor = 1.0 / problem.constants().L;
  result.budget_bits = o.budget_bits;
  for (const AlgorithmEntry& entry : config.algorithms) {
    CompareSeries best;
    bool have_best = false;
    for (int e = o.grid_low; e <= o.grid_high; ++e) {
      AlgorithmEntry fixed = entry;
      fixed.gamma = std::ldexp(result.anchor, e);
      ResolvedRun r = resolve(fixed, problem, config, 0);
      CompareSeries series;
      series.label = entry.label;
      series.algorithm = entry.algorithm;
      series.compressor = entry.compressor;
      series.gamma = r.algo.gamma;
      series.tau = is_anchored(entry.algorithm) ? r.algo.tau : MetricSample::kMissing;
      for (std::size_t s = 0; s < o.seeds; ++s) {
        r.algo.seed = s;
        RunReport report = execute(problem, r, config);
        series.final_dist_sq.push_back(final_value(report, &MetricSample::dist_sq));
        series.samples.push_back(std::move(report.samples));
      }
      series.median_final = median(series.final_dist_sq);
      result.grid.push_back({entry.label, series.gamma, series.median_final});
      log << entry.label << " gamma 2^" << e << "/L = " << format_number(series.gamma)
          << ": median final dist_sq " << format_number(series.median_final) << '\n';
      if (!have_best || series.median_final < best.median_final) {
        best = std::move(series);
        have_best = true;
      }
    }
    result.series.push_back(std::move(best));
  }
  return result;
}

int cmd_compare(const CompareOptions& options, const std::string& out_dir,
                std::ostream& log) {
  const CompareResult result = run_compare(options, log);
  ensure_dir(out_dir);
  {
    std::ofstream grid = open_out(fs::path(out_dir) / "compare_grid.csv");
    grid << "label,gamma,median_final_dist_sq\n";
    for (const CompareGridPoint& p : result.grid) {
      grid << p.label << ',' << format_number(p.gamma) << ','
           << format_number(p.median_final) << '\n';
    }
  }
  std::ofstream summary = open_out(fs::path(out_dir) / "compare_summary.csv");
  summary << "label,algorithm,compressor,gamma,tau,budget_bits,median_final_dist_sq\n";
  for (const CompareSeries& s : result.series) {
    const std::string stem = file_stem(s.label);
    for (std::size_t i = 0; i < s.samples.size(); ++i) {
      std::ofstream out =
          open_out(fs::path(out_dir) / (stem + "_seed" + std::to_string(i) + ".csv"));
      write_report_csv(out, s.samples[i]);
    }
    std::ofstream mean = open_out(fs::path(out_dir) / (stem + "_mean.csv"));
    write_report_csv(mean, mean_samples(s.samples));
    summary << s.label << ',' << to_string(s.algorithm) << ',' << s.compressor << ','
            << format_number(s.gamma) << ',' << format_number(s.tau) << ','
            << result.budget_bits << ',' << format_number(s.median_final) << '\n';
    log << s.label << ": best gamma " << format_number(s.gamma)
        << ", median final dist_sq " << format_number(s.median_final) << '\n';
  }
  return 0;
}

}  // namespace vicomp
