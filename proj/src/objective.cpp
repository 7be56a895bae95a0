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

#include "zoldsd/objective.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include <Eigen/Dense>

namespace zoldsd {

namespace {

// Exact L for data losses with Hessian (c/n) Phi^T Phi, c = curvature cap.
// Skipped for very wide designs where the dense Gram is not worth building.
std::optional<double> gram_smoothness(const Dataset& data, double curvature) {
  const int d = data.n_features;
  if (d > 2048) return std::nullopt;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  for (const auto& row : data.rows) {
    for (const auto& [i, vi] : row.features) {
      for (const auto& [j, vj] : row.features) {
        gram(i - 1, j - 1) += vi * vj;
      }
    }
  }
  gram *= curvature / static_cast<double>(data.rows.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  return solver.eigenvalues().maxCoeff();
}

double sparse_dot(const Vector& w, const Dataset::Row& row) {
  double acc = 0.0;
  for (const auto& [idx, val] : row.features) acc += w[idx - 1] * val;
  return acc;
}

void check_dim(const Vector& x, Eigen::Index dim, const char* what) {
  if (x.size() != dim) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(dim) + ", got " +
                                std::to_string(x.size()));
  }
}

// log(1 + exp(z)) without overflow.
double log1p_exp(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                  : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace

ObjectiveOracle quadratic_objective(const Vector& diag, const Vector& shift) {
  if (diag.size() != shift.size()) {
    throw std::invalid_argument("quadratic_objective: diag and shift dimensions differ");
  }
  if (diag.size() == 0) {
    throw std::invalid_argument("quadratic_objective: empty diagonal");
  }
  if ((diag.array() <= 0.0).any()) {
    throw std::invalid_argument("quadratic_objective: diagonal entries must be positive");
  }
  const Eigen::Index dim = diag.size();
  ObjectiveOracle oracle;
  oracle.dim = dim;
  oracle.smoothness = diag.maxCoeff();
  oracle.value = [diag, shift, dim](const Vector& x) {
    check_dim(x, dim, "quadratic value");
    return 0.5 * (diag.array() * (x - shift).array().square()).sum();
  };
  oracle.grad = [diag, shift, dim](const Vector& x) {
    check_dim(x, dim, "quadratic grad");
    return Vector(diag.array() * (x - shift).array());
  };
  return oracle;
}

ObjectiveOracle least_squares_objective(const Dataset& data) {
  if (data.rows.empty()) {
    throw std::invalid_argument("least_squares_objective: empty dataset");
  }
  // The oracle keeps its own copy so it stays valid past the caller's dataset.
  auto owned = std::make_shared<const Dataset>(data);
  const Eigen::Index dim = owned->n_features;
  const double n = static_cast<double>(owned->rows.size());
  ObjectiveOracle oracle;
  oracle.dim = dim;
  oracle.smoothness = gram_smoothness(*owned, 1.0);
  oracle.value = [owned, dim, n](const Vector& w) {
    check_dim(w, dim, "least_squares value");
    double acc = 0.0;
    for (const auto& row : owned->rows) {
      const double r = sparse_dot(w, row) - row.label;
      acc += r * r;
    }
    return acc / (2.0 * n);
  };
  oracle.grad = [owned, dim, n](const Vector& w) {
    check_dim(w, dim, "least_squares grad");
    Vector g = Vector::Zero(dim);
    for (const auto& row : owned->rows) {
      const double r = sparse_dot(w, row) - row.label;
      for (const auto& [idx, val] : row.features) g[idx - 1] += r * val;
    }
    return Vector(g / n);
  };
  return oracle;
}

ObjectiveOracle logistic_objective(const Dataset& data) {
  if (data.rows.empty()) {
    throw std::invalid_argument("logistic_objective: empty dataset");
  }
  for (const auto& row : data.rows) {
    if (row.label != 1.0 && row.label != -1.0) {
      throw std::invalid_argument("logistic_objective: labels must be +1 or -1");
    }
  }
  auto owned = std::make_shared<const Dataset>(data);
  const Eigen::Index dim = owned->n_features;
  const double n = static_cast<double>(owned->rows.size());
  ObjectiveOracle oracle;
  oracle.dim = dim;
  oracle.smoothness = gram_smoothness(*owned, 0.25);
  oracle.value = [owned, dim, n](const Vector& w) {
    check_dim(w, dim, "logistic value");
    double acc = 0.0;
    for (const auto& row : owned->rows) {
      acc += log1p_exp(-row.label * sparse_dot(w, row));
    }
    return acc / n;
  };
  oracle.grad = [owned, dim, n](const Vector& w) {
    check_dim(w, dim, "logistic grad");
    Vector g = Vector::Zero(dim);
    for (const auto& row : owned->rows) {
      const double coef = -row.label * sigmoid(-row.label * sparse_dot(w, row));
      for (const auto& [idx, val] : row.features) g[idx - 1] += coef * val;
    }
    return Vector(g / n);
  };
  return oracle;
}

}  // namespace zoldsd
