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

#include <cmath>
#include <cstdint>

#include <Eigen/Core>

namespace zoldsd {

using Vector = Eigen::VectorXd;

/// Counter-based deterministic generator (SplitMix64 core).
///
/// A run owns one root seed; independent subsystems (direction sampling,
/// policy initialization, diagnostics, ...) draw from disjoint streams derived
/// with `stream(seed, id)`, so the sequence seen by one consumer never depends
/// on how often another consumer draws. All outputs are reproducible bit for
/// bit for a given (seed, stream, call sequence).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed ^ kInit)) {}

  /// Derives the `stream_id`-th independent stream of `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    Rng r(seed);
    r.state_ = mix(r.state_ + mix(stream_id * kGamma + kInit));
    return r;
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; the second variate of each pair is
  /// cached, so draws stay deterministic per call sequence.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // 1 - u is in (0, 1], keeping the log finite.
    const double u = uniform();
    const double v = uniform();
    const double radius = std::sqrt(-2.0 * std::log1p(-u));
    const double angle = 2.0 * kPi * v;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  Vector normal_vector(Eigen::Index dim) {
    Vector z(dim);
    for (Eigen::Index i = 0; i < dim; ++i) z[i] = normal();
    return z;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kInit = 0x5851F42D4C957F2Dull;
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace zoldsd
