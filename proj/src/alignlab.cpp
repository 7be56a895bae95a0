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

#include "zoldsd/alignlab.hpp"

#include <cmath>
#include <stdexcept>

#include "zoldsd/estimators.hpp"
#include "zoldsd/trace.hpp"

namespace zoldsd {

namespace {

// Streams carved out of a dynamics seed; keeps FD pairs, series estimates and
// REINFORCE batches on non-overlapping draws.
constexpr std::uint64_t kSeriesStream = 1u << 20;
constexpr std::uint64_t kReinforceStream = 1u << 21;
constexpr std::uint64_t kXUpdateStream = 1u << 22;

}  // namespace

AlignmentEstimate mc_expected_alignment(const SamplingPolicy& policy,
                                        const Vector& g, std::int64_t n,
                                        Rng& rng) {
  if (n < 100) {
    throw std::invalid_argument("mc_expected_alignment: need n >= 100");
  }
  if (!(g.norm() > kDegenerateNorm)) {
    throw std::invalid_argument("mc_expected_alignment: degenerate gradient");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const Vector v = policy.mu + policy.epsilon * rng.normal_vector(policy.mu.size());
    const double c = v.norm() > kDegenerateNorm ? alignment(v, g) : 0.0;
    sum += c;
    sum_sq += c * c;
  }
  AlignmentEstimate est;
  est.n = n;
  est.mean = sum / static_cast<double>(n);
  const double var =
      std::max(0.0, sum_sq / static_cast<double>(n) - est.mean * est.mean);
  est.stderr_ = std::sqrt(var / static_cast<double>(n));
  return est;
}

FdGradEstimate fd_grad_expected_alignment(const SamplingPolicy& policy,
                                          const Vector& g, std::int64_t n,
                                          double h, std::uint64_t seed) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("fd_grad_expected_alignment: step must be positive");
  }
  if (n < 100) {
    throw std::invalid_argument("fd_grad_expected_alignment: need n >= 100");
  }
  const Eigen::Index d = policy.mu.size();
  FdGradEstimate est{Vector(d), Vector(d)};
  for (Eigen::Index i = 0; i < d; ++i) {
    // Identically seeded +h / -h evaluations: both see the same z draws, so
    // the Monte Carlo noise cancels in each paired difference.
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::int64_t s = 0; s < n; ++s) {
      const Vector offset = policy.mu + policy.epsilon * rng.normal_vector(d);
      Vector v = offset;
      v[i] += h;
      const double c_plus = v.norm() > kDegenerateNorm ? alignment(v, g) : 0.0;
      v[i] = offset[i] - h;
      const double c_minus = v.norm() > kDegenerateNorm ? alignment(v, g) : 0.0;
      const double diff = (c_plus - c_minus) / (2.0 * h);
      sum += diff;
      sum_sq += diff * diff;
    }
    const double mean = sum / static_cast<double>(n);
    const double var =
        std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
    est.grad[i] = mean;
    est.stderr_[i] = std::sqrt(var / static_cast<double>(n));
  }
  return est;
}

std::vector<LandscapeCell> landscape_grid(const Vector& g, double epsilon,
                                          double lo, double hi, int resolution,
                                          std::int64_t n_per_cell,
                                          std::uint64_t seed) {
  if (g.size() != 2) {
    throw std::invalid_argument("landscape_grid: gradient must be 2-dimensional");
  }
  if (resolution < 3) {
    throw std::invalid_argument("landscape_grid: resolution must be >= 3");
  }
  if (!(hi > lo)) {
    throw std::invalid_argument("landscape_grid: empty range");
  }
  if (!(epsilon > 0.0)) {
    // Every cell would collapse to a point mass; at mu = 0 that is undefined.
    throw std::invalid_argument("landscape_grid: epsilon must be positive");
  }
  std::vector<LandscapeCell> grid;
  grid.reserve(static_cast<std::size_t>(resolution) * resolution);
  const double step = (hi - lo) / static_cast<double>(resolution - 1);
  std::uint64_t cell_id = 0;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j, ++cell_id) {
      LandscapeCell cell;
      cell.mu1 = lo + step * i;
      cell.mu2 = lo + step * j;
      SamplingPolicy policy{Vector(2), epsilon};
      policy.mu << cell.mu1, cell.mu2;
      Rng rng = Rng::stream(seed, cell_id);
      cell.estimate = mc_expected_alignment(policy, g, n_per_cell, rng);
      grid.push_back(std::move(cell));
    }
  }
  return grid;
}

std::string landscape_to_csv(const std::vector<LandscapeCell>& grid) {
  std::string out = "mu1,mu2,mean,stderr\n";
  for (const auto& cell : grid) {
    out += format_double(cell.mu1);
    out += ',';
    out += format_double(cell.mu2);
    out += ',';
    out += format_double(cell.estimate.mean);
    out += ',';
    out += format_double(cell.estimate.stderr_);
    out += '\n';
  }
  return out;
}

double psi_alignment(const Vector& a, const Vector& u) { return alignment(u, a); }

double spectral_norm_power(const Eigen::MatrixXd& m, int iters,
                           std::uint64_t seed) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("spectral_norm_power: need a square matrix");
  }
  Rng rng(seed);
  Vector v = rng.normal_vector(m.rows());
  v.normalize();
  // Iterating on m^2 keeps opposite-sign eigenvalue pairs from making the
  // iterate oscillate; |lambda|_max is recovered as ||m v||. Stops once the
  // estimate is stationary to machine precision.
  double sigma = 0.0;
  for (int i = 0; i < iters; ++i) {
    Vector w = m * (m * v);
    const double norm = w.norm();
    if (!(norm > 0.0)) return 0.0;
    v = w / norm;
    const double next = std::sqrt(norm);
    if (i > 0 && std::abs(next - sigma) <= 1e-14 * next) {
      sigma = next;
      break;
    }
    sigma = next;
  }
  return sigma;
}

PsiProbe numeric_hessian_psi(const Vector& a, const Vector& u, double h) {
  if (std::abs(a.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("numeric_hessian_psi: a must be a unit vector");
  }
  const double u_norm = u.norm();
  if (h <= 0.0) h = 1e-4 * u_norm;
  if (!(u_norm > 10.0 * h)) {
    throw std::invalid_argument("numeric_hessian_psi: u too close to the origin");
  }
  const Eigen::Index d = u.size();
  Eigen::MatrixXd hess(d, d);
  const double inv4h2 = 1.0 / (4.0 * h * h);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      Vector p = u;
      p[i] += h;
      p[j] += h;
      const double fpp = psi_alignment(a, p);
      p = u;
      p[i] += h;
      p[j] -= h;
      const double fpm = psi_alignment(a, p);
      p = u;
      p[i] -= h;
      p[j] += h;
      const double fmp = psi_alignment(a, p);
      p = u;
      p[i] -= h;
      p[j] -= h;
      const double fmm = psi_alignment(a, p);
      hess(i, j) = (fpp - fpm - fmp + fmm) * inv4h2;
      hess(j, i) = hess(i, j);
    }
  }
  PsiProbe probe;
  probe.a = a;
  probe.u = u;
  probe.hessian_norm = spectral_norm_power(hess);
  probe.bound = 20.0 / (u_norm * u_norm);
  return probe;
}

double dynamics_floor(double delta, Eigen::Index dim, double l_gamma_x) {
  const double angle =
      delta / (32.0 * static_cast<double>(dim)) + l_gamma_x + std::acos(1.0 - delta);
  const double c = std::cos(angle);
  return c * c * (1.0 - std::exp(-1.0));
}

DynamicsReport dynamics_check(const Vector& g, const Vector& mu0,
                              const DynamicsConfig& config) {
  if (!(g.norm() > kDegenerateNorm)) {
    throw std::invalid_argument("dynamics_check: degenerate gradient");
  }
  if (config.horizon < 1) {
    throw std::invalid_argument("dynamics_check: horizon must be positive");
  }
  const Eigen::Index d = g.size();
  const bool at_origin = !(mu0.norm() > kDegenerateNorm);

  if (config.theoretical_schedule && !at_origin) {
    if (!(config.delta > 0.0) || !(config.delta < 0.5)) {
      throw std::invalid_argument("dynamics_check: delta must lie in (0, 1/2)");
    }
    const double cos_beta0 = normalize(mu0).dot(normalize(g));
    if (!(cos_beta0 > 0.0) || !(cos_beta0 < 1.0)) {
      throw std::invalid_argument(
          "dynamics_check: cos(beta0) must lie in (0, 1) for the band schedule");
    }
  }

  // min_t ||mu_t|| is not known up front; ||mu_0|| stands in for it in the
  // epsilon schedule and the report asserts post hoc that the norm never fell
  // below half of it.
  const double m_proxy = mu0.norm();
  double epsilon;
  if (!config.theoretical_schedule) {
    epsilon = config.epsilon_const;
  } else if (at_origin) {
    epsilon = config.epsilon_at_origin;
  } else {
    epsilon = std::pow(static_cast<double>(d), -1.5) * config.delta * m_proxy / 960.0;
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("dynamics_check: schedule produced epsilon <= 0");
  }

  Vector grad = g;
  Vector x;
  double l_gamma_x = 0.0;
  if (config.oracle != nullptr) {
    if (!config.oracle->has_grad()) {
      throw std::invalid_argument("dynamics_check: interleaved x-updates need a gradient oracle");
    }
    x = config.x0.size() == 0 ? Vector(Vector::Zero(config.oracle->dim)) : config.x0;
    grad = config.oracle->grad(x);
    if (config.oracle->smoothness) {
      l_gamma_x = *config.oracle->smoothness * config.gamma_x;
    }
  }

  DynamicsReport report;
  report.floor_value = dynamics_floor(config.delta, d, l_gamma_x);
  report.series.reserve(static_cast<std::size_t>(config.horizon) + 1);

  SamplingPolicy policy{mu0, epsilon};
  Rng x_rng = Rng::stream(config.seed, kXUpdateStream);

  for (int t = 0; t <= config.horizon; ++t) {
    DynamicsPoint point;
    point.t = t;
    point.mu_norm = policy.mu.norm();
    point.cos_beta = point.mu_norm > kDegenerateNorm
                         ? normalize(policy.mu).dot(normalize(grad))
                         : 0.0;
    Rng series_rng = Rng::stream(config.seed, kSeriesStream + static_cast<std::uint64_t>(t));
    point.estimate =
        mc_expected_alignment(policy, grad, config.n_per_estimate, series_rng);
    report.series.push_back(point);
    if (point.mu_norm < 0.5 * m_proxy) report.mu_norm_floor_ok = false;
    if (t == config.horizon) break;

    // Mean ascent on the expected alignment.
    const double gamma_mu = config.theoretical_schedule
                                ? point.mu_norm * point.mu_norm / 640.0
                                : config.gamma_mu_const;
    if (gamma_mu > 0.0) {
      Vector g_mu;
      if (config.mu_grad_mode == DynamicsConfig::MuGradMode::kFdPairedSeeds) {
        const double h = config.fd_step_rel * std::max(point.mu_norm, 1e-12);
        g_mu = fd_grad_expected_alignment(
                   policy, grad, config.n_grad, h,
                   config.seed + 0x9E37u * static_cast<std::uint64_t>(t))
                   .grad;
      } else {
        Rng batch_rng =
            Rng::stream(config.seed, kReinforceStream + static_cast<std::uint64_t>(t));
        const auto dirs = sample_directions(policy, config.reinforce_k, batch_rng);
        std::vector<double> rewards;
        rewards.reserve(dirs.size());
        for (const Vector& v : dirs) {
          rewards.push_back(v.norm() > kDegenerateNorm ? alignment(v, grad) : 0.0);
        }
        g_mu = reinforce_mu_grad_mean(policy, dirs, rewards).g_mu;
      }
      policy.mu += gamma_mu * g_mu;
    }

    // Optional interleaved parameter update (single-sample directional step),
    // rotating the gradient the mean is chasing.
    if (config.oracle != nullptr && config.gamma_x > 0.0) {
      const Vector v = policy.mu + epsilon * x_rng.normal_vector(d);
      if (v.norm() > kDegenerateNorm && grad.norm() > kDegenerateNorm) {
        const Vector unit = normalize(v);
        x -= config.gamma_x * unit * unit.dot(grad);
        grad = config.oracle->grad(x);
        if (!(grad.norm() > kDegenerateNorm)) break;  // reached stationarity
      }
    }
  }

  int nondecreasing = 0;
  int pairs = 0;
  for (std::size_t i = 1; i < report.series.size(); ++i) {
    const auto& prev = report.series[i - 1].estimate;
    const auto& cur = report.series[i].estimate;
    const double slack =
        2.0 * std::sqrt(prev.stderr_ * prev.stderr_ + cur.stderr_ * cur.stderr_);
    if (cur.mean - prev.mean >= -slack) ++nondecreasing;
    ++pairs;
  }
  report.monotone_fraction =
      pairs > 0 ? static_cast<double>(nondecreasing) / pairs : 1.0;
  return report;
}

std::string dynamics_to_csv(const DynamicsReport& report) {
  std::string out = "t,mean,stderr,cos_beta,mu_norm\n";
  for (const auto& p : report.series) {
    out += std::to_string(p.t);
    out += ',';
    out += format_double(p.estimate.mean);
    out += ',';
    out += format_double(p.estimate.stderr_);
    out += ',';
    out += format_double(p.cos_beta);
    out += ',';
    out += format_double(p.mu_norm);
    out += '\n';
  }
  return out;
}

}  // namespace zoldsd
