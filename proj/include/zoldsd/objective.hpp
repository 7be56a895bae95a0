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

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zoldsd/rng.hpp"

namespace zoldsd {

/// Black-box scalar objective over R^d. `grad` may be empty for purely
/// zeroth-order targets; when present it is exact. `smoothness` carries the
/// analytically exact Lipschitz constant of the gradient where it is known.
/// Oracles are immutable after construction and safe to evaluate concurrently.
struct ObjectiveOracle {
  Eigen::Index dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> grad;
  std::optional<double> smoothness;

  bool has_grad() const { return static_cast<bool>(grad); }
};

/// f(x) = 1/2 sum_i diag_i (x_i - shift_i)^2, exact gradient, L = max(diag).
ObjectiveOracle quadratic_objective(const Vector& diag, const Vector& shift);

/// Sparse labelled rows in LIBSVM convention: 1-based feature indices,
/// strictly increasing within a row, missing features implicit zeros.
/// Read-only after parsing.
struct Dataset {
  struct Row {
    std::vector<std::pair<int, double>> features;
    double label = 0.0;
  };
  std::vector<Row> rows;
  int n_features = 0;
};

/// Parses LIBSVM text ("label idx:val idx:val ..."). n_features becomes the
/// largest index seen. Throws std::runtime_error on malformed tokens,
/// non-increasing indices, non-numeric labels, or an empty stream.
Dataset parse_libsvm(std::istream& in);
Dataset parse_libsvm(const std::string& text);
Dataset load_libsvm(const std::string& path);

/// Inverse of parse_libsvm on well-formed data (round-trip exact).
std::string to_libsvm(const Dataset& data);

/// Appends a constant 1.0 feature (index n_features + 1) to every row.
Dataset with_intercept(Dataset data);

/// f(w) = (1/2n) sum_i (<w, phi_i> - y_i)^2 over the dataset, exact gradient.
ObjectiveOracle least_squares_objective(const Dataset& data);

/// Mean logistic loss f(w) = (1/n) sum_i log(1 + exp(-y_i <w, phi_i>)),
/// labels must be +-1, exact gradient.
ObjectiveOracle logistic_objective(const Dataset& data);

}  // namespace zoldsd
