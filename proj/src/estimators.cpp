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

#include "zoldsd/estimators.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace zoldsd {

namespace {

double checked_value(const ObjectiveOracle& oracle, const Vector& x) {
  const double v = oracle.value(x);
  if (!std::isfinite(v)) {
    throw std::runtime_error("oracle returned a non-finite probe value");
  }
  return v;
}

}  // namespace

double two_point(const ObjectiveOracle& oracle, const Vector& x,
                 const Vector& v, double tau) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("two_point: tau must be positive");
  }
  const double forward = checked_value(oracle, x + tau * v);
  const double backward = checked_value(oracle, x - tau * v);
  return (forward - backward) / (2.0 * tau);
}

Vector dgd_estimate(const Vector& grad, const std::vector<Vector>& directions) {
  if (directions.empty()) {
    throw std::invalid_argument("dgd_estimate: no directions");
  }
  Vector g = Vector::Zero(grad.size());
  for (const Vector& v : directions) {
    const Vector unit = normalize(v);
    g += unit * unit.dot(grad);
  }
  return g / static_cast<double>(directions.size());
}

MuGradEstimate reinforce_mu_grad_mean(const SamplingPolicy& policy,
                                      const std::vector<Vector>& directions,
                                      const std::vector<double>& rewards) {
  const std::size_t k = directions.size();
  if (k < 2) {
    throw std::invalid_argument("reinforce_mu_grad_mean: need K >= 2 for the mean baseline");
  }
  if (rewards.size() != k) {
    throw std::invalid_argument("reinforce_mu_grad_mean: rewards/directions length mismatch");
  }
  const double baseline =
      std::accumulate(rewards.begin(), rewards.end(), 0.0) / static_cast<double>(k);

  MuGradEstimate est;
  est.baseline_kind = BaselineKind::kMean;
  est.advantages.reserve(k);
  est.g_mu = Vector::Zero(policy.mu.size());
  for (std::size_t i = 0; i < k; ++i) {
    const double adv = rewards[i] - baseline;
    est.advantages.push_back(adv);
    est.g_mu += adv * log_density_grad(policy, directions[i]);
  }
  est.g_mu /= static_cast<double>(k);
  return est;
}

MuGradEstimate reinforce_mu_grad_loo(const SamplingPolicy& policy,
                                     const ProbeSet& probes, int reward_sign) {
  const std::size_t k = probes.directions.size();
  if (k < 2) {
    throw std::invalid_argument("reinforce_mu_grad_loo: need K >= 2 for the leave-one-out baseline");
  }
  if (probes.forward_values.size() != k) {
    throw std::invalid_argument("reinforce_mu_grad_loo: probe/direction length mismatch");
  }
  if (reward_sign != 1 && reward_sign != -1) {
    throw std::invalid_argument("reinforce_mu_grad_loo: reward_sign must be +1 or -1");
  }
  const double total = std::accumulate(probes.forward_values.begin(),
                                       probes.forward_values.end(), 0.0);
  const double kd = static_cast<double>(k);

  MuGradEstimate est;
  est.baseline_kind = BaselineKind::kLeaveOneOut;
  est.advantages.reserve(k);
  est.g_mu = Vector::Zero(policy.mu.size());
  for (std::size_t i = 0; i < k; ++i) {
    const double adv =
        reward_sign * (kd * probes.forward_values[i] - total) / (kd - 1.0);
    est.advantages.push_back(adv);
    est.g_mu += adv * log_density_grad(policy, probes.directions[i]);
  }
  est.g_mu /= kd;
  return est;
}

BestDirection select_best_direction(const ObjectiveOracle& oracle,
                                    const Vector& x,
                                    std::vector<Vector> directions,
                                    double tau) {
  if (directions.empty()) {
    throw std::invalid_argument("select_best_direction: need K >= 1");
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("select_best_direction: tau must be positive");
  }
  BestDirection best;
  best.probes.tau = tau;
  best.probes.forward_values.reserve(directions.size());
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const double probe = checked_value(oracle, x + tau * directions[i]);
    best.probes.forward_values.push_back(probe);
    // strict < keeps the lowest index on ties
    if (probe < best.probes.forward_values[best.index]) best.index = i;
  }
  best.probes.directions = std::move(directions);
  return best;
}

Vector zo_gradient(const ObjectiveOracle& oracle, const Vector& x,
                   const Vector& v_star, double tau,
                   std::optional<double> cached_forward) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("zo_gradient: tau must be positive");
  }
  const double forward =
      cached_forward ? *cached_forward : checked_value(oracle, x + tau * v_star);
  if (!std::isfinite(forward)) {
    throw std::runtime_error("zo_gradient: non-finite forward probe");
  }
  const double backward = checked_value(oracle, x - tau * v_star);
  return ((forward - backward) / (2.0 * tau)) * v_star;
}

}  // namespace zoldsd
