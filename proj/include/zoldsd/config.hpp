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

#include <cstdint>
#include <optional>
#include <string>

#include "zoldsd/objective.hpp"
#include "zoldsd/optimizer.hpp"

namespace zoldsd {

/// One experiment, parsed from a flat key=value file ('#' comments). Required
/// keys: objective, optimizer, seed. Everything else defaults as listed.
struct RunConfig {
  // objective
  std::string objective;  // quadratic | least_squares | logistic
  std::string data_path;  // LIBSVM path for data-backed objectives
  int dim = 0;            // quadratic dimension
  double quad_cond = 1.0;   // diag log-spaced from 1 down to 1/quad_cond
  double quad_shift = 1.0;  // minimizer at quad_shift * ones
  bool add_intercept = false;

  // optimizer
  std::string optimizer;  // ldsd | dgd | zo_ldsd | zo_sgd | zo_adamm | zo_jaguar
  int k = 5;
  double tau = 1e-3;
  double epsilon = 1.0;
  double gamma_x = 1e-3;
  double gamma_mu = 1e-3;
  std::string schedule = "constant";  // constant | cosine
  std::string plugin = "sgd_momentum";  // sgd_momentum | adamm | jaguar_sign
  double beta = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adamm_floor = 1e-8;
  std::string mu_init = "random_unit";  // random_unit | collinear | zero
  int reward_sign = -1;  // -1 rewards descent (default); +1 rewards raw f
  bool normalize_vstar = false;

  std::uint64_t seed = 0;
  std::optional<long> budget;
  std::optional<long> horizon;

  std::string raw_text;  // exact config bytes, hashed into the run id
};

/// Parses and validates config text. Throws std::runtime_error naming the
/// offending key on unknown keys, malformed values, or violated constraints.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Deterministic short id: FNV-1a over the config bytes and the seed.
std::string run_id_for(const RunConfig& config, std::uint64_t seed);

ObjectiveOracle build_objective(const RunConfig& config);
RunSpec to_run_spec(const RunConfig& config);

}  // namespace zoldsd
