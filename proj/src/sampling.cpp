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

#include "zoldsd/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace zoldsd {

std::vector<Vector> sample_directions(const SamplingPolicy& policy, int k,
                                      Rng& rng) {
  if (k <= 0) {
    throw std::invalid_argument("sample_directions: K must be positive");
  }
  if (!(policy.epsilon > 0.0)) {
    throw std::invalid_argument("sample_directions: epsilon must be positive");
  }
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    out.push_back(policy.mu + policy.epsilon * rng.normal_vector(policy.mu.size()));
  }
  return out;
}

Vector normalize(const Vector& v) {
  const double norm = v.norm();
  if (!(norm > kDegenerateNorm)) {
    throw std::invalid_argument("normalize: degenerate direction (norm ~ 0)");
  }
  return v / norm;
}

double alignment(const Vector& v, const Vector& g) {
  if (v.size() != g.size()) {
    throw std::invalid_argument("alignment: dimension mismatch");
  }
  const double nv = v.norm();
  const double ng = g.norm();
  if (!(nv > kDegenerateNorm) || !(ng > kDegenerateNorm)) {
    throw std::invalid_argument("alignment: degenerate direction (norm ~ 0)");
  }
  const double c = v.dot(g) / (nv * ng);
  const double c2 = c * c;
  return c2 > 1.0 ? 1.0 : c2;  // clamp roundoff just past 1
}

Vector log_density_grad(const SamplingPolicy& policy, const Vector& v) {
  if (v.size() != policy.mu.size()) {
    throw std::invalid_argument("log_density_grad: dimension mismatch");
  }
  return (v - policy.mu) / (policy.epsilon * policy.epsilon);
}

Vector random_unit(Eigen::Index dim, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vector z = rng.normal_vector(dim);
    if (z.norm() > kDegenerateNorm) return normalize(z);
  }
  throw std::runtime_error("random_unit: repeated degenerate draws");
}

Vector unit_with_cos(const Vector& g, double cos_beta, Rng& rng) {
  if (!(std::abs(cos_beta) <= 1.0)) {
    throw std::invalid_argument("unit_with_cos: cos_beta must be in [-1, 1]");
  }
  const Vector ghat = normalize(g);
  if (std::abs(cos_beta) == 1.0) return Vector(cos_beta * ghat);
  if (g.size() < 2) {
    throw std::invalid_argument("unit_with_cos: need dim >= 2 for |cos| < 1");
  }
  // Random unit direction in the orthogonal complement of g.
  Vector w;
  double wnorm = 0.0;
  for (int attempt = 0; attempt < 64 && !(wnorm > kDegenerateNorm); ++attempt) {
    Vector z = rng.normal_vector(g.size());
    w = z - ghat * ghat.dot(z);
    wnorm = w.norm();
  }
  if (!(wnorm > kDegenerateNorm)) {
    throw std::runtime_error("unit_with_cos: repeated degenerate draws");
  }
  const double sin_beta = std::sqrt(1.0 - cos_beta * cos_beta);
  return Vector(cos_beta * ghat + sin_beta * (w / wnorm));
}

}  // namespace zoldsd
