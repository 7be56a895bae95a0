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

// Numerical lab for the expected-alignment functional
// F_g(mu) = E_{v ~ N(mu, eps^2 I)} [ alignment(v, g) ]:
// Monte Carlo evaluation, its 2-d landscape, finite-difference gradients with
// common random numbers, the squared-cosine kernel psi and its Hessian-norm
// bound, and the growth-then-floor dynamics of F under mean ascent.

#pragma once

#include <cstdint>
#include <vector>

#include "zoldsd/objective.hpp"
#include "zoldsd/sampling.hpp"

namespace zoldsd {

struct AlignmentEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample std / sqrt(n)
  std::int64_t n = 0;
};

/// Sample mean and standard error of alignment(v, g) over n i.i.d. draws
/// v ~ N(mu, eps^2 I). Requires n >= 100 and a nondegenerate g.
AlignmentEstimate mc_expected_alignment(const SamplingPolicy& policy,
                                        const Vector& g, std::int64_t n,
                                        Rng& rng);

struct FdGradEstimate {
  Vector grad;
  Vector stderr_;  // per-coordinate standard error of the paired differences
};

/// Central finite-difference gradient of F_g at policy.mu, one coordinate at
/// a time. The +h and -h evaluations of a coordinate share the same draws
/// (paired seeds derived from `seed`), which cancels almost all Monte Carlo
/// noise in the difference.
FdGradEstimate fd_grad_expected_alignment(const SamplingPolicy& policy,
                                          const Vector& g, std::int64_t n,
                                          double h, std::uint64_t seed);

struct LandscapeCell {
  double mu1 = 0.0;
  double mu2 = 0.0;
  AlignmentEstimate estimate;
};

/// F over a square (mu1, mu2) grid for a 2-d gradient g, row-major with mu2
/// varying fastest. Each cell draws n_per_cell samples from its own stream.
std::vector<LandscapeCell> landscape_grid(const Vector& g, double epsilon,
                                          double lo, double hi, int resolution,
                                          std::int64_t n_per_cell,
                                          std::uint64_t seed);

std::string landscape_to_csv(const std::vector<LandscapeCell>& grid);

/// psi_a(u) = <unit(a), unit(u)>^2, the deterministic alignment kernel.
double psi_alignment(const Vector& a, const Vector& u);

struct PsiProbe {
  Vector a;
  Vector u;
  double hessian_norm = 0.0;  // numeric spectral norm of the psi Hessian at u
  double bound = 0.0;         // 20 / ||u||^2
};

/// Central-difference Hessian of psi_a at u (step h, default 1e-4 ||u||),
/// spectral norm via power iteration. Requires ||a|| = 1 and ||u|| > 10 h.
PsiProbe numeric_hessian_psi(const Vector& a, const Vector& u, double h = 0.0);

/// Largest |eigenvalue| of a symmetric matrix by power iteration (early exit
/// once stationary; `iters` caps the worst case).
double spectral_norm_power(const Eigen::MatrixXd& m, int iters = 20000,
                           std::uint64_t seed = 17);

struct DynamicsPoint {
  int t = 0;
  AlignmentEstimate estimate;
  double cos_beta = 0.0;
  double mu_norm = 0.0;
};

struct DynamicsReport {
  std::vector<DynamicsPoint> series;
  double monotone_fraction = 0.0;
  double floor_value = 0.0;
  bool mu_norm_floor_ok = true;  // ||mu_t|| never fell below ||mu_0|| / 2
};

/// Post-growth alignment floor cos(delta/(32 d) + l_gamma_x +
/// arccos(1 - delta))^2 (1 - 1/e); l_gamma_x is 0 for a frozen gradient.
double dynamics_floor(double delta, Eigen::Index dim, double l_gamma_x);

struct DynamicsConfig {
  int horizon = 50;
  std::int64_t n_per_estimate = 10000;
  double delta = 0.4;  // band parameter: requires cos beta0 in [delta, 1-delta]
  // Step schedules: gamma_mu_t = ||mu_t||^2 / 640 and
  // eps = d^(-3/2) delta M / 960 with M standing in for min_t ||mu_t|| via
  // ||mu_0|| (checked post hoc); constants mode uses the overrides below.
  bool theoretical_schedule = true;
  double gamma_mu_const = 1e-3;
  double epsilon_const = 1.0;
  // epsilon fallback when mu0 = 0 (the schedule would degenerate to 0).
  double epsilon_at_origin = 1.0;
  enum class MuGradMode { kFdPairedSeeds, kReinforce } mu_grad_mode =
      MuGradMode::kFdPairedSeeds;
  std::int64_t n_grad = 100000;  // draws per FD evaluation
  int reinforce_k = 256;         // batch size in REINFORCE mode
  double fd_step_rel = 1e-4;     // FD step as a fraction of ||mu||
  std::uint64_t seed = 1;
  // Optional interleaved x-updates (single-sample directional steps). When
  // oracle is set it must expose a gradient; g then tracks grad f(x_t).
  const ObjectiveOracle* oracle = nullptr;
  Vector x0;
  double gamma_x = 0.0;
};

/// Iterates mean-ascent updates on F and records the estimated series, the
/// realized cos(beta_t) and ||mu_t||. With mu0 = 0 the schedule pins the mean
/// in place and the series sits at the 1/d saddle level. Throws when the
/// theoretical schedule is requested with cos(beta0) outside (0, 1).
DynamicsReport dynamics_check(const Vector& g, const Vector& mu0,
                              const DynamicsConfig& config);

std::string dynamics_to_csv(const DynamicsReport& report);

}  // namespace zoldsd
