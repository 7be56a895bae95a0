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

#include "zoldsd/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace zoldsd {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Draws k directions, redrawing the measure-zero degenerate ones so the
// iteration never divides by a vanishing norm.
std::vector<Vector> sample_valid_directions(OptimizerState& state, int k,
                                            Rng& rng) {
  auto dirs = sample_directions(state.policy, k, rng);
  for (auto& v : dirs) {
    int attempts = 0;
    while (!(v.norm() > kDegenerateNorm) && attempts < 64) {
      v = state.policy.mu +
          state.policy.epsilon * rng.normal_vector(state.policy.mu.size());
      ++state.degenerate_resamples;
      ++attempts;
    }
    if (!(v.norm() > kDegenerateNorm)) {
      throw std::runtime_error("direction sampling kept returning degenerate draws");
    }
  }
  return dirs;
}

double batch_alignment(const std::vector<Vector>& dirs, const Vector& grad) {
  double acc = 0.0;
  for (const Vector& v : dirs) acc += alignment(v, grad);
  return acc / static_cast<double>(dirs.size());
}

}  // namespace

double scheduled_gamma_x(const StepSizes& steps, long t, long horizon) {
  if (steps.schedule == Schedule::kConstant) return steps.gamma_x;
  if (horizon <= 0) {
    throw std::invalid_argument("cosine schedule needs a known horizon");
  }
  const double phase = kPi * static_cast<double>(t) / static_cast<double>(horizon);
  return steps.gamma_x * 0.5 * (1.0 + std::cos(phase));
}

void init_plugin_buffers(PluginBuffers& buffers, Eigen::Index dim) {
  buffers.m = Vector::Zero(dim);
  buffers.s = Vector::Zero(dim);
  buffers.initialized = true;
}

Vector apply_plugin(const PluginRule& rule, PluginBuffers& buffers,
                    const Vector& g, double gamma, long t) {
  if (!buffers.initialized || buffers.m.size() != g.size()) {
    throw std::invalid_argument("apply_plugin: buffers not initialized to the gradient dimension");
  }
  switch (rule.kind) {
    case PluginKind::kSgdMomentum:
      buffers.m = rule.beta * buffers.m + g;
      return Vector(-gamma * buffers.m);
    case PluginKind::kAdamm: {
      buffers.m = rule.beta1 * buffers.m + (1.0 - rule.beta1) * g;
      buffers.s =
          rule.beta2 * buffers.s.array() + (1.0 - rule.beta2) * g.array().square();
      const double c1 = 1.0 - std::pow(rule.beta1, static_cast<double>(t));
      const double c2 = 1.0 - std::pow(rule.beta2, static_cast<double>(t));
      const Eigen::ArrayXd m_hat = buffers.m.array() / c1;
      const Eigen::ArrayXd s_hat = buffers.s.array() / c2;
      return Vector(-gamma * m_hat / (s_hat.sqrt() + rule.floor));
    }
    case PluginKind::kJaguarSign:
      buffers.m = rule.beta * buffers.m + (1.0 - rule.beta) * g;
      return Vector(-gamma * buffers.m.array().sign());
  }
  throw std::logic_error("apply_plugin: unknown rule kind");
}

StepDiag ldsd_step(OptimizerState& state, const ObjectiveOracle& oracle,
                   const StepSizes& steps, int k, long horizon, Rng& rng) {
  if (!oracle.has_grad()) {
    throw std::invalid_argument("ldsd_step: oracle does not expose a gradient");
  }
  if (steps.gamma_mu > 0.0 && k < 2) {
    throw std::invalid_argument("ldsd_step: K >= 2 required when gamma_mu > 0");
  }
  StepDiag diag;
  Vector grad = oracle.grad(state.x);
  if (!(grad.norm() > kDegenerateNorm)) {
    // Already at stationarity: alignment is undefined, so record and move on.
    diag.skipped = true;
    diag.g_x = Vector::Zero(state.x.size());
    diag.grad_pre = std::move(grad);
    ++state.skipped_steps;
    ++state.t;
    return diag;
  }

  const auto dirs = sample_valid_directions(state, k, rng);
  diag.g_x = dgd_estimate(grad, dirs);
  diag.mc_alignment = batch_alignment(dirs, grad);

  if (steps.gamma_mu > 0.0) {
    std::vector<double> rewards;
    rewards.reserve(dirs.size());
    for (const Vector& v : dirs) rewards.push_back(alignment(v, grad));
    const MuGradEstimate mu_grad =
        reinforce_mu_grad_mean(state.policy, dirs, rewards);
    state.policy.mu += steps.gamma_mu * mu_grad.g_mu;
  }
  diag.grad_pre = std::move(grad);
  state.x -= scheduled_gamma_x(steps, state.t, horizon) * diag.g_x;
  state.oracle_calls += k;  // K directional-derivative probes
  ++state.t;
  return diag;
}

StepDiag zo_ldsd_step(OptimizerState& state, const ObjectiveOracle& oracle,
                      const StepSizes& steps, int k, double tau,
                      const PluginRule& plugin, int reward_sign,
                      bool normalize_vstar, long horizon, Rng& rng) {
  if (k < 2) {
    throw std::invalid_argument("zo_ldsd_step: K >= 2 required");
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("zo_ldsd_step: tau must be positive");
  }
  StepDiag diag;
  auto dirs = sample_valid_directions(state, k, rng);
  if (oracle.has_grad()) {
    Vector grad = oracle.grad(state.x);
    if (grad.norm() > kDegenerateNorm) {
      diag.mc_alignment = batch_alignment(dirs, grad);
    }
    diag.grad_pre = std::move(grad);
  }

  BestDirection best = select_best_direction(oracle, state.x, std::move(dirs), tau);
  const Vector& v_star = best.probes.directions[best.index];
  const Vector g_dir = normalize_vstar ? normalize(v_star) : v_star;
  diag.g_x = zo_gradient(oracle, state.x, g_dir, tau,
                         normalize_vstar
                             ? std::nullopt
                             : std::optional<double>(
                                   best.probes.forward_values[best.index]));

  const MuGradEstimate mu_grad =
      reinforce_mu_grad_loo(state.policy, best.probes, reward_sign);

  state.x += apply_plugin(plugin, state.buffers, diag.g_x,
                          scheduled_gamma_x(steps, state.t, horizon),
                          state.t + 1);
  state.policy.mu += steps.gamma_mu * mu_grad.g_mu;
  // K forward probes plus the single backward probe along v*; with
  // normalize_vstar the cached forward no longer matches, costing one more.
  state.oracle_calls += k + (normalize_vstar ? 2 : 1);
  ++state.t;
  return diag;
}

StepDiag zo_baseline_step(OptimizerState& state, const ObjectiveOracle& oracle,
                          const StepSizes& steps, int k, double tau,
                          const PluginRule& plugin, long horizon, Rng& rng) {
  if (k < 1) {
    throw std::invalid_argument("zo_baseline_step: K >= 1 required");
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("zo_baseline_step: tau must be positive");
  }
  StepDiag diag;
  const auto dirs = sample_valid_directions(state, k, rng);
  if (oracle.has_grad()) {
    Vector grad = oracle.grad(state.x);
    if (grad.norm() > kDegenerateNorm) {
      diag.mc_alignment = batch_alignment(dirs, grad);
    }
    diag.grad_pre = std::move(grad);
  }

  if (k == 1) {
    diag.g_x = two_point(oracle, state.x, dirs[0], tau) * dirs[0];
    state.oracle_calls += 2;
  } else {
    // Forward differences against one shared anchor: K + 1 calls, the same
    // per-iteration budget as the K-sample framework step.
    const double anchor = oracle.value(state.x);
    if (!std::isfinite(anchor)) {
      throw std::runtime_error("zo_baseline_step: non-finite anchor value");
    }
    diag.g_x = Vector::Zero(state.x.size());
    for (const Vector& v : dirs) {
      const double probe = oracle.value(state.x + tau * v);
      if (!std::isfinite(probe)) {
        throw std::runtime_error("zo_baseline_step: non-finite probe value");
      }
      diag.g_x += ((probe - anchor) / tau) * v;
    }
    diag.g_x /= static_cast<double>(k);
    state.oracle_calls += k + 1;
  }

  state.x += apply_plugin(plugin, state.buffers, diag.g_x,
                          scheduled_gamma_x(steps, state.t, horizon),
                          state.t + 1);
  ++state.t;
  return diag;
}

long calls_per_iteration(const RunSpec& spec) {
  switch (spec.kind) {
    case OptKind::kLdsd:
    case OptKind::kDgd:
      return spec.k;
    case OptKind::kZoLdsd:
      return spec.k + (spec.normalize_vstar ? 2 : 1);
    case OptKind::kZoSgd:
    case OptKind::kZoAdamm:
    case OptKind::kZoJaguar:
      return spec.k == 1 ? 2 : spec.k + 1;
  }
  throw std::logic_error("calls_per_iteration: unknown optimizer kind");
}

Trace run(const RunSpec& spec, const ObjectiveOracle& oracle,
          const std::string& run_id) {
  if (spec.horizon.has_value() == spec.budget.has_value()) {
    throw std::invalid_argument("run: exactly one of horizon / budget must be set");
  }
  const long per_iter = calls_per_iteration(spec);
  long horizon = 0;
  if (spec.horizon) {
    horizon = *spec.horizon;
    if (horizon <= 0) throw std::invalid_argument("run: horizon must be positive");
  } else {
    if (*spec.budget < per_iter) {
      throw std::invalid_argument("run: oracle budget smaller than one iteration's cost");
    }
    horizon = *spec.budget / per_iter;
  }

  const bool directional =
      spec.kind == OptKind::kLdsd || spec.kind == OptKind::kDgd;
  const bool baseline = spec.kind == OptKind::kZoSgd ||
                        spec.kind == OptKind::kZoAdamm ||
                        spec.kind == OptKind::kZoJaguar;
  if (directional && !oracle.has_grad()) {
    throw std::invalid_argument("run: directional mode needs an exact-gradient oracle");
  }

  OptimizerState state;
  state.x = Vector::Zero(oracle.dim);
  state.policy.epsilon = spec.epsilon;
  init_plugin_buffers(state.buffers, oracle.dim);

  Rng mu_rng = Rng::stream(spec.seed, 1);
  MuInit mu_init = spec.mu_init;
  if (spec.kind == OptKind::kDgd || baseline) mu_init = MuInit::kZero;
  switch (mu_init) {
    case MuInit::kRandomUnit:
      state.policy.mu = random_unit(oracle.dim, mu_rng);
      break;
    case MuInit::kCollinear: {
      if (!oracle.has_grad()) {
        throw std::invalid_argument("run: collinear mu_init needs a gradient oracle");
      }
      const Vector g0 = oracle.grad(state.x);
      if (!(g0.norm() > kDegenerateNorm)) {
        throw std::invalid_argument("run: collinear mu_init at a stationary start");
      }
      state.policy.mu = normalize(g0);
      break;
    }
    case MuInit::kZero:
      state.policy.mu = Vector::Zero(oracle.dim);
      break;
  }

  StepSizes steps = spec.steps;
  if (spec.kind == OptKind::kDgd || baseline) steps.gamma_mu = 0.0;

  Rng dir_rng = Rng::stream(spec.seed, 0);
  Trace trace;
  trace.reserve(static_cast<std::size_t>(horizon));
  for (long t = 0; t < horizon; ++t) {
    StepDiag diag;
    switch (spec.kind) {
      case OptKind::kLdsd:
      case OptKind::kDgd:
        diag = ldsd_step(state, oracle, steps, spec.k, horizon, dir_rng);
        break;
      case OptKind::kZoLdsd:
        diag = zo_ldsd_step(state, oracle, steps, spec.k, spec.tau, spec.plugin,
                            spec.reward_sign, spec.normalize_vstar, horizon,
                            dir_rng);
        break;
      case OptKind::kZoSgd:
      case OptKind::kZoAdamm:
      case OptKind::kZoJaguar:
        diag = zo_baseline_step(state, oracle, steps, spec.k, spec.tau,
                                spec.plugin, horizon, dir_rng);
        break;
    }

    TraceRecord rec;
    rec.run_id = run_id;
    rec.t = t;
    rec.oracle_calls = state.oracle_calls;
    rec.loss = oracle.value(state.x);
    rec.mu_norm = state.policy.mu.norm();
    rec.skipped = diag.skipped;
    rec.seed = spec.seed;
    rec.mc_alignment = diag.mc_alignment;
    if (oracle.has_grad()) {
      rec.grad_norm = oracle.grad(state.x).norm();
      // align_cos compares the estimator against the gradient at the point
      // where it was formed (the pre-step iterate).
      if (!diag.skipped && diag.grad_pre &&
          diag.grad_pre->norm() > kDegenerateNorm &&
          diag.g_x.norm() > kDegenerateNorm) {
        rec.align_cos = diag.g_x.dot(*diag.grad_pre) /
                        (diag.g_x.norm() * diag.grad_pre->norm());
      }
    }
    trace.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace zoldsd
