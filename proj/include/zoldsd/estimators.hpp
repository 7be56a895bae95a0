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

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "zoldsd/objective.hpp"
#include "zoldsd/sampling.hpp"

namespace zoldsd {

/// K candidate directions together with their forward probes f(x + tau * v)
/// at a common smoothing radius tau. Probes are kept so later estimators can
/// reuse them without spending oracle calls.
struct ProbeSet {
  std::vector<Vector> directions;
  std::vector<double> forward_values;
  double tau = 0.0;
};

enum class BaselineKind { kMean, kLeaveOneOut };

struct MuGradEstimate {
  Vector g_mu;
  BaselineKind baseline_kind = BaselineKind::kMean;
  std::vector<double> advantages;
};

/// Central two-point directional estimate (f(x + tau v) - f(x - tau v)) /
/// (2 tau), approaching <grad f(x), v> as tau -> 0 and exact on quadratics.
/// Costs exactly 2 oracle calls. Throws on non-finite probes or tau <= 0.
double two_point(const ObjectiveOracle& oracle, const Vector& x,
                 const Vector& v, double tau);

/// K-sample projection average (1/K) sum_k unit(v_k) <unit(v_k), grad>.
Vector dgd_estimate(const Vector& grad, const std::vector<Vector>& directions);

/// Score-function estimate of the mean-gradient of E[reward] with the mean
/// baseline: (1/K) sum_k (r_k - mean(r)) (v_k - mu) / epsilon^2.
///
/// Including a sample's own reward in the baseline scales the expectation to
/// ((K-1)/K) * grad_mu E[reward]; the deficit vanishes as K grows and is
/// absorbed by the mean step size in optimization use. Requires K >= 2.
MuGradEstimate reinforce_mu_grad_mean(const SamplingPolicy& policy,
                                      const std::vector<Vector>& directions,
                                      const std::vector<double>& rewards);

/// Leave-one-out variant reusing forward probes as rewards: the advantage of
/// sample i against the others is (K f_i - sum_j f_j) / (K - 1), scaled by
/// reward_sign (+1 treats f itself as reward, -1 rewards descent). Exactly
/// unbiased for grad_mu E[reward_sign * f(x + tau v)]; spends no oracle
/// calls. Requires K >= 2.
MuGradEstimate reinforce_mu_grad_loo(const SamplingPolicy& policy,
                                     const ProbeSet& probes, int reward_sign);

struct BestDirection {
  std::size_t index = 0;
  ProbeSet probes;
};

/// Probes f(x + tau v) for every candidate (exactly K oracle calls) and
/// returns the index of the minimal probe, ties broken by lowest index. The
/// full probe set is returned for reuse.
BestDirection select_best_direction(const ObjectiveOracle& oracle,
                                    const Vector& x,
                                    std::vector<Vector> directions,
                                    double tau);

/// two_point(oracle, x, v_star, tau) * v_star with the direction left
/// unnormalized. When the forward probe f(x + tau v_star) is supplied it is
/// reused and only the backward probe is evaluated (1 oracle call instead
/// of 2).
Vector zo_gradient(const ObjectiveOracle& oracle, const Vector& x,
                   const Vector& v_star, double tau,
                   std::optional<double> cached_forward = std::nullopt);

}  // namespace zoldsd
