// Copyright 2026 The zoldsd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zoldsd/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "zoldsd/alignlab.hpp"
#include "zoldsd/trace.hpp"

namespace zoldsd {

namespace {

namespace fs = std::filesystem;

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

double iqr(const std::vector<double>& v) {
  return quantile(v, 0.75) - quantile(v, 0.25);
}

std::string stem_of(const std::string& path) {
  return fs::path(path).stem().string();
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty() && dir != ".") fs::create_directories(dir);
}

bool same_objective(const RunConfig& a, const RunConfig& b) {
  return a.objective == b.objective && a.data_path == b.data_path &&
         a.dim == b.dim && a.quad_cond == b.quad_cond &&
         a.quad_shift == b.quad_shift && a.add_intercept == b.add_intercept;
}

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

int report(std::ostream& log, const std::vector<Check>& checks) {
  bool all = true;
  for (const auto& c : checks) {
    log << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail
        << "\n";
    all = all && c.pass;
  }
  return all ? 0 : 1;
}

std::vector<Check> verify_alignment_1_over_d(std::ostream&) {
  std::vector<Check> checks;
  for (int d : {4, 16, 64, 256}) {
    SamplingPolicy policy{Vector::Zero(d), 1.0};
    Vector g = Vector::Unit(d, 0);
    Rng rng = Rng::stream(2026, static_cast<std::uint64_t>(d));
    const auto est = mc_expected_alignment(policy, g, 100000, rng);
    const double target = 1.0 / d;
    Check c;
    c.name = "alignment_1_over_d d=" + std::to_string(d);
    c.pass = std::abs(est.mean - target) <= 3.0 * est.stderr_;
    c.detail = "|mean*d - 1| = " + format_double(std::abs(est.mean * d - 1.0)) +
               ", |mean - 1/d| = " + format_double(std::abs(est.mean - target)) +
               " vs 3*stderr = " + format_double(3.0 * est.stderr_);
    checks.push_back(std::move(c));
  }
  return checks;
}

std::vector<Check> verify_hessian_bound(std::ostream&) {
  std::vector<Check> checks;
  double worst_ratio = 0.0;
  int violations = 0;
  Rng rng(97);
  int probes_total = 0;
  for (int d : {2, 8, 32}) {
    for (int i = 0; i < 334 && probes_total < 1000; ++i, ++probes_total) {
      const Vector a = random_unit(d, rng);
      Vector u = rng.normal_vector(d);
      // keep u away from the singular origin and spread over scales
      u *= std::pow(10.0, -1.0 + 2.0 * rng.uniform()) / std::max(u.norm(), 1e-12);
      const auto probe = numeric_hessian_psi(a, u, 0.0);
      const double ratio = probe.hessian_norm / probe.bound;
      worst_ratio = std::max(worst_ratio, ratio);
      if (probe.hessian_norm > probe.bound * (1.0 + 1e-3)) ++violations;
    }
  }
  Check c;
  c.name = "hessian_bound (1000 probes, d in {2,8,32})";
  c.pass = violations == 0;
  c.detail = "max(hessian_norm / bound) = " + format_double(worst_ratio) +
             ", violations beyond 1e-3 slack: " + std::to_string(violations);
  return {c};
}

std::vector<Check> verify_landscape(const std::string& out_dir,
                                    std::ostream& log) {
  Vector g(2);
  g << 1.0, 0.0;
  const int resolution = 21;
  const auto grid = landscape_grid(g, 0.5, -2.0, 2.0, resolution, 20000, 11);

  ensure_dir(out_dir);
  const std::string path = (fs::path(out_dir) / "landscape.csv").string();
  std::ofstream out(path, std::ios::binary);
  out << landscape_to_csv(grid);
  out.close();
  log << "landscape grid written to " << path << "\n";

  // mirror symmetry: F(mu) == F(-mu) within 3 combined stderr
  double worst_sigma = 0.0;
  int bad_pairs = 0;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const int mi = resolution - 1 - i;
      const int mj = resolution - 1 - j;
      const auto& cell = grid[static_cast<std::size_t>(i) * resolution + j];
      const auto& mirror = grid[static_cast<std::size_t>(mi) * resolution + mj];
      const double se = std::sqrt(cell.estimate.stderr_ * cell.estimate.stderr_ +
                                  mirror.estimate.stderr_ * mirror.estimate.stderr_);
      if (se == 0.0) continue;
      const double sigma = std::abs(cell.estimate.mean - mirror.estimate.mean) / se;
      worst_sigma = std::max(worst_sigma, sigma);
      if (sigma > 3.0) ++bad_pairs;
    }
  }
  // aligned and orthogonal extremes
  const auto& aligned = grid[static_cast<std::size_t>(resolution - 1) * resolution +
                             resolution / 2];  // mu = (2, 0)
  const auto& orthogonal = grid[static_cast<std::size_t>(resolution / 2) * resolution +
                                resolution - 1];  // mu = (0, 2)

  std::vector<Check> checks;
  Check sym;
  sym.name = "landscape mirror symmetry";
  sym.pass = bad_pairs == 0;
  sym.detail = "max |F(mu)-F(-mu)| = " + format_double(worst_sigma) +
               " combined-stderr units, pairs beyond 3: " + std::to_string(bad_pairs);
  checks.push_back(std::move(sym));
  Check extremes;
  extremes.name = "landscape extremes (aligned high, orthogonal low)";
  extremes.pass = aligned.estimate.mean > 0.8 && orthogonal.estimate.mean < 0.2;
  extremes.detail = "F(2,0) = " + format_double(aligned.estimate.mean) +
                    ", F(0,2) = " + format_double(orthogonal.estimate.mean);
  checks.push_back(std::move(extremes));
  return checks;
}

std::vector<Check> verify_dynamics(const std::string& out_dir,
                                   std::ostream& log) {
  std::vector<Check> checks;
  const int d = 16;
  Rng init_rng(5);
  Vector g = random_unit(d, init_rng);

  DynamicsConfig cfg;
  cfg.horizon = 50;
  cfg.n_per_estimate = 10000;
  cfg.delta = 0.4;
  cfg.seed = 310;
  const Vector mu0 = unit_with_cos(g, 0.5, init_rng);
  const auto report_growth = dynamics_check(g, mu0, cfg);

  ensure_dir(out_dir);
  const std::string series_path = (fs::path(out_dir) / "dynamics.csv").string();
  std::ofstream series_out(series_path, std::ios::binary);
  series_out << dynamics_to_csv(report_growth);
  series_out.close();
  log << "dynamics series written to " << series_path << "\n";

  const auto& first = report_growth.series.front();
  const auto& last = report_growth.series.back();
  Check mono;
  mono.name = "dynamics monotone growth (cos beta0 = 0.5, d = 16)";
  mono.pass = report_growth.monotone_fraction >= 0.95;
  mono.detail = "monotone_fraction = " + format_double(report_growth.monotone_fraction);
  checks.push_back(std::move(mono));

  Check floor;
  floor.name = "dynamics terminal value above floor";
  floor.pass = last.estimate.mean >=
               report_growth.floor_value - 3.0 * last.estimate.stderr_;
  floor.detail = "terminal = " + format_double(last.estimate.mean) + " (from " +
                 format_double(first.estimate.mean) +
                 "), floor = " + format_double(report_growth.floor_value);
  checks.push_back(std::move(floor));

  Check norm_floor;
  norm_floor.name = "dynamics ||mu_t|| stayed above ||mu_0|| / 2";
  norm_floor.pass = report_growth.mu_norm_floor_ok;
  norm_floor.detail = report_growth.mu_norm_floor_ok ? "held" : "violated";
  checks.push_back(std::move(norm_floor));

  // saddle: mu0 = 0 pins the schedule, the series sits at 1/d
  DynamicsConfig saddle_cfg = cfg;
  saddle_cfg.seed = 311;
  saddle_cfg.epsilon_at_origin = 1.0;
  const auto saddle = dynamics_check(g, Vector::Zero(d), saddle_cfg);
  double worst = 0.0;
  bool ok = true;
  for (const auto& p : saddle.series) {
    const double dev = std::abs(p.estimate.mean - 1.0 / d);
    worst = std::max(worst, dev / p.estimate.stderr_);
    ok = ok && dev <= 3.0 * p.estimate.stderr_;
  }
  Check sad;
  sad.name = "dynamics saddle (mu0 = 0 stays at 1/d)";
  sad.pass = ok;
  sad.detail = "max deviation = " + format_double(worst) + " stderr units";
  checks.push_back(std::move(sad));
  return checks;
}

std::vector<Check> verify_unbiasedness(std::ostream& log) {
  std::vector<Check> checks;
  const int d = 8;
  const double epsilon = 0.3;
  Rng setup(41);
  const Vector g = random_unit(d, setup);
  SamplingPolicy policy{random_unit(d, setup), epsilon};

  // Mean-baseline variant with alignment rewards. The K-sample mean baseline
  // scales the expectation by (K-1)/K, so the bias check runs at a K large
  // enough for that deficit to vanish against the Monte Carlo resolution.
  const int k = 1000;
  const std::int64_t n_estimates = 100000;
  Vector mean_estimate = Vector::Zero(d);
  Vector second_moment = Vector::Zero(d);
  Rng rng = Rng::stream(42, 7);
  std::vector<double> rewards(static_cast<std::size_t>(k));
  for (std::int64_t e = 0; e < n_estimates; ++e) {
    const auto dirs = sample_directions(policy, k, rng);
    for (int i = 0; i < k; ++i) rewards[static_cast<std::size_t>(i)] = alignment(dirs[i], g);
    const Vector est = reinforce_mu_grad_mean(policy, dirs, rewards).g_mu;
    mean_estimate += est;
    second_moment += est.cwiseProduct(est);
  }
  mean_estimate /= static_cast<double>(n_estimates);
  second_moment /= static_cast<double>(n_estimates);
  const Vector est_se =
      ((second_moment - mean_estimate.cwiseProduct(mean_estimate)).cwiseMax(0.0) /
       static_cast<double>(n_estimates))
          .cwiseSqrt();

  // Paired-seed central finite difference of the Monte Carlo objective.
  const double h = 1e-3;
  const auto fd = fd_grad_expected_alignment(policy, g, 1000000, h, 4242);

  Rng coord_rng(4243);
  for (int pick = 0; pick < 3; ++pick) {
    const int i = static_cast<int>(coord_rng.next_u64() % d);
    const double combined =
        std::sqrt(est_se[i] * est_se[i] + fd.stderr_[i] * fd.stderr_[i]);
    const double gap = std::abs(mean_estimate[i] - fd.grad[i]);
    Check c;
    c.name = "mean-baseline estimator tracks grad_mu E[C], coordinate " +
             std::to_string(i);
    c.pass = gap <= 5.0 * combined;
    c.detail = "estimate = " + format_double(mean_estimate[i]) +
               ", fd = " + format_double(fd.grad[i]) +
               ", gap = " + format_double(gap) +
               " vs 5*combined_se = " + format_double(5.0 * combined);
    checks.push_back(std::move(c));
  }

  // Leave-one-out variant against the closed-form gradient of
  // E[-f(x + tau v)] on a quadratic: grad_mu = -tau * diag .* (x + tau mu - s).
  {
    Rng quad_rng(99);
    Vector diag(d), shift(d), x(d);
    for (int i = 0; i < d; ++i) {
      diag[i] = 0.5 + quad_rng.uniform();
      shift[i] = quad_rng.normal();
      x[i] = quad_rng.normal();
    }
    const auto oracle = quadratic_objective(diag, shift);
    const double tau = 0.25;
    const Vector analytic =
        -tau * (diag.array() * (x + tau * policy.mu - shift).array()).matrix();

    const int k_loo = 5;
    const std::int64_t n_loo = 200000;
    Vector loo_mean = Vector::Zero(d);
    Vector loo_m2 = Vector::Zero(d);
    Rng loo_rng = Rng::stream(43, 3);
    for (std::int64_t e = 0; e < n_loo; ++e) {
      auto probes_dirs = sample_directions(policy, k_loo, loo_rng);
      ProbeSet probes;
      probes.tau = tau;
      probes.forward_values.reserve(k_loo);
      for (const auto& v : probes_dirs) {
        probes.forward_values.push_back(oracle.value(x + tau * v));
      }
      probes.directions = std::move(probes_dirs);
      const Vector est = reinforce_mu_grad_loo(policy, probes, -1).g_mu;
      loo_mean += est;
      loo_m2 += est.cwiseProduct(est);
    }
    loo_mean /= static_cast<double>(n_loo);
    loo_m2 /= static_cast<double>(n_loo);
    const Vector loo_se =
        ((loo_m2 - loo_mean.cwiseProduct(loo_mean)).cwiseMax(0.0) /
         static_cast<double>(n_loo))
            .cwiseSqrt();
    double worst = 0.0;
    bool ok = true;
    for (int i = 0; i < d; ++i) {
      const double sigma = std::abs(loo_mean[i] - analytic[i]) /
                           std::max(loo_se[i], 1e-300);
      worst = std::max(worst, sigma);
      ok = ok && sigma <= 5.0;
    }
    Check c;
    c.name = "leave-one-out estimator unbiased for grad_mu E[-f] (K = 5)";
    c.pass = ok;
    c.detail = "max deviation = " + format_double(worst) + " stderr units";
    checks.push_back(std::move(c));
  }

  (void)log;
  return checks;
}

}  // namespace

std::string resolve_out_dir(const std::string& flag_value) {
  if (const char* env = std::getenv("ZOLDSD_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return flag_value.empty() ? std::string(".") : flag_value;
}

int cmd_run(const RunConfig& config, const std::string& out_dir,
            std::ostream& log) {
  const auto oracle = build_objective(config);
  const auto spec = to_run_spec(config);
  const std::string run_id = run_id_for(config, config.seed);
  const Trace trace = run(spec, oracle, run_id);
  ensure_dir(out_dir);
  const std::string path = (fs::path(out_dir) / (run_id + ".csv")).string();
  write_trace_csv(trace, path);
  const auto& last = trace.back();
  log << "run " << run_id << ": " << trace.size() << " iterations, "
      << last.oracle_calls << " oracle calls, final loss "
      << format_double(last.loss) << " -> " << path << "\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& config_paths,
                const std::vector<std::uint64_t>& seeds,
                const std::string& out_dir, std::ostream& log,
                std::vector<CompareRow>* rows_out) {
  if (config_paths.size() < 2) {
    log << "compare: need at least two --config files\n";
    return 2;
  }
  if (seeds.empty()) {
    log << "compare: need a nonempty --seeds list\n";
    return 2;
  }
  std::vector<RunConfig> configs;
  configs.reserve(config_paths.size());
  for (const auto& path : config_paths) configs.push_back(load_config(path));

  // protocol guard: identical objective and identical oracle budget
  for (std::size_t i = 1; i < configs.size(); ++i) {
    if (!same_objective(configs[0], configs[i])) {
      log << "compare: refusing to run: objective sections differ between "
          << config_paths[0] << " and " << config_paths[i] << "\n";
      return 2;
    }
  }
  for (const auto& cfg : configs) {
    if (!cfg.budget) {
      log << "compare: refusing to run: every config must set an oracle budget\n";
      return 2;
    }
  }
  for (std::size_t i = 1; i < configs.size(); ++i) {
    if (*configs[i].budget != *configs[0].budget) {
      log << "compare: refusing to run: oracle budgets differ ("
          << *configs[0].budget << " vs " << *configs[i].budget << ")\n";
      return 2;
    }
  }

  struct Job {
    std::size_t config_index;
    std::uint64_t seed;
    TraceRecord final_record;
    std::string error;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (const auto seed : seeds) jobs.push_back(Job{c, seed, {}, {}});
  }

  std::vector<ObjectiveOracle> oracles;
  oracles.reserve(configs.size());
  for (const auto& cfg : configs) oracles.push_back(build_objective(cfg));

  ensure_dir(out_dir);

  // One worker per run; runs share nothing mutable (immutable oracles, a
  // private RNG stream, and a private output file each).
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      Job& job = jobs[j];
      try {
        RunConfig cfg = configs[job.config_index];
        cfg.seed = job.seed;
        RunSpec spec = to_run_spec(cfg);
        const std::string run_id = run_id_for(cfg, job.seed);
        const Trace trace = run(spec, oracles[job.config_index], run_id);
        write_trace_csv(trace,
                        (fs::path(out_dir) / (run_id + ".csv")).string());
        job.final_record = trace.back();
      } catch (const std::exception& e) {
        job.error = e.what();
      }
    }
  };
  const unsigned n_workers = std::max(1u, std::min<unsigned>(
      std::thread::hardware_concurrency(), static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  for (const auto& job : jobs) {
    if (!job.error.empty()) {
      log << "compare: run failed (config " << config_paths[job.config_index]
          << ", seed " << job.seed << "): " << job.error << "\n";
      return 1;
    }
  }

  std::string summary = "method,seeds,iterations,oracle_calls,final_loss_median,"
                        "final_loss_iqr,final_grad_norm_median,final_grad_norm_iqr\n";
  std::vector<CompareRow> rows;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    std::vector<double> losses;
    std::vector<double> grads;
    long iterations = 0;
    long calls = 0;
    for (const auto& job : jobs) {
      if (job.config_index != c) continue;
      losses.push_back(job.final_record.loss);
      if (job.final_record.grad_norm) grads.push_back(*job.final_record.grad_norm);
      iterations = job.final_record.t + 1;
      calls = job.final_record.oracle_calls;
    }
    CompareRow row;
    row.method = stem_of(config_paths[c]);
    row.iterations = iterations;
    row.oracle_calls = calls;
    row.final_loss_median = median(losses);
    row.final_loss_iqr = iqr(losses);
    row.final_grad_median = grads.empty() ? std::nan("") : median(grads);
    row.final_grad_iqr = grads.empty() ? std::nan("") : iqr(grads);
    summary += row.method + ',' + std::to_string(seeds.size()) + ',' +
               std::to_string(row.iterations) + ',' + std::to_string(row.oracle_calls) +
               ',' + format_double(row.final_loss_median) + ',' +
               format_double(row.final_loss_iqr) + ',' +
               (grads.empty() ? "" : format_double(row.final_grad_median)) + ',' +
               (grads.empty() ? "" : format_double(row.final_grad_iqr)) + '\n';
    rows.push_back(std::move(row));
  }

  const std::string path = (fs::path(out_dir) / "compare_summary.csv").string();
  std::ofstream out(path, std::ios::binary);
  out << summary;
  out.close();
  log << summary;
  log << "summary written to " << path << "\n";
  if (rows_out != nullptr) *rows_out = std::move(rows);
  return 0;
}

int cmd_verify(const std::string& suite, const std::string& out_dir,
               std::ostream& log) {
  std::vector<Check> checks;
  if (suite == "alignment_1_over_d") {
    checks = verify_alignment_1_over_d(log);
  } else if (suite == "hessian_bound") {
    checks = verify_hessian_bound(log);
  } else if (suite == "landscape") {
    checks = verify_landscape(out_dir, log);
  } else if (suite == "dynamics") {
    checks = verify_dynamics(out_dir, log);
  } else if (suite == "unbiasedness") {
    checks = verify_unbiasedness(log);
  } else {
    log << "verify: unknown suite '" << suite
        << "' (expected alignment_1_over_d | hessian_bound | landscape | "
           "dynamics | unbiasedness)\n";
    return 2;
  }
  return report(log, checks);
}

int cmd_landscape(double epsilon, double lo, double hi, int resolution,
                  std::int64_t n_per_cell, std::uint64_t seed,
                  const std::string& out_dir, std::ostream& log) {
  Vector g(2);
  g << 1.0, 0.0;
  const auto grid = landscape_grid(g, epsilon, lo, hi, resolution, n_per_cell, seed);
  ensure_dir(out_dir);
  const std::string path = (fs::path(out_dir) / "landscape.csv").string();
  std::ofstream out(path, std::ios::binary);
  out << landscape_to_csv(grid);
  out.close();
  log << "landscape grid (" << resolution << "x" << resolution
      << ", n per cell " << n_per_cell << ") written to " << path << "\n";
  return 0;
}

}  // namespace zoldsd
