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

#include <vector>

#include "zoldsd/rng.hpp"

namespace zoldsd {

/// Gaussian direction distribution N(mu, epsilon^2 I). The mean is the
/// learnable part; the per-coordinate standard deviation stays fixed.
/// Policies are immutable value snapshots; sampling takes an explicit Rng.
struct SamplingPolicy {
  Vector mu;
  double epsilon = 1.0;
};

inline constexpr double kDegenerateNorm = 1e-30;

/// K independent draws v = mu + epsilon * z, z standard normal.
/// Throws std::invalid_argument for k == 0 or epsilon <= 0.
std::vector<Vector> sample_directions(const SamplingPolicy& policy, int k,
                                      Rng& rng);

/// v / ||v||. Throws std::invalid_argument when ||v|| <= 1e-30 (degenerate
/// direction).
Vector normalize(const Vector& v);

/// Squared cosine of the angle between v and g, clamped to [0, 1].
/// Throws on degenerate inputs.
double alignment(const Vector& v, const Vector& g);

/// Gradient of the Gaussian log-density w.r.t. the mean: (v - mu) / epsilon^2.
Vector log_density_grad(const SamplingPolicy& policy, const Vector& v);

/// Standard normal draw rescaled to unit norm.
Vector random_unit(Eigen::Index dim, Rng& rng);

/// Unit vector whose cosine with g equals cos_beta (the orthogonal part is a
/// random unit direction). Requires cos_beta in [-1, 1] and dim >= 2 whenever
/// |cos_beta| < 1.
Vector unit_with_cos(const Vector& g, double cos_beta, Rng& rng);

}  // namespace zoldsd
