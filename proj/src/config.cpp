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

#include "zoldsd/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace zoldsd {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw std::runtime_error("config: " + key + ": " + why);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    bad(key, "expected a number, got '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(out)) {
    bad(key, "expected a finite number, got '" + v + "'");
  }
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long out = 0;
  try {
    out = std::stol(v, &used);
  } catch (const std::exception&) {
    bad(key, "expected an integer, got '" + v + "'");
  }
  if (used != v.size()) bad(key, "expected an integer, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(v, &used);
  } catch (const std::exception&) {
    bad(key, "expected an unsigned integer, got '" + v + "'");
  }
  if (used != v.size()) bad(key, "expected an unsigned integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, "expected a boolean, got '" + v + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  cfg.raw_text = text;

  std::unordered_map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key=value, got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": empty key or value");
    }
    if (kv.count(key)) bad(key, "duplicate key");
    kv[key] = value;
  }

  auto take = [&kv](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (auto v = take("objective")) cfg.objective = *v;
  if (auto v = take("data")) cfg.data_path = *v;
  if (auto v = take("dim")) cfg.dim = static_cast<int>(to_long("dim", *v));
  if (auto v = take("quad_cond")) cfg.quad_cond = to_double("quad_cond", *v);
  if (auto v = take("quad_shift")) cfg.quad_shift = to_double("quad_shift", *v);
  if (auto v = take("add_intercept")) cfg.add_intercept = to_bool("add_intercept", *v);
  if (auto v = take("optimizer")) cfg.optimizer = *v;
  if (auto v = take("K")) cfg.k = static_cast<int>(to_long("K", *v));
  if (auto v = take("tau")) cfg.tau = to_double("tau", *v);
  if (auto v = take("epsilon")) cfg.epsilon = to_double("epsilon", *v);
  if (auto v = take("gamma_x")) cfg.gamma_x = to_double("gamma_x", *v);
  if (auto v = take("gamma_mu")) cfg.gamma_mu = to_double("gamma_mu", *v);
  if (auto v = take("schedule")) cfg.schedule = *v;
  if (auto v = take("plugin")) cfg.plugin = *v;
  if (auto v = take("beta")) cfg.beta = to_double("beta", *v);
  if (auto v = take("beta1")) cfg.beta1 = to_double("beta1", *v);
  if (auto v = take("beta2")) cfg.beta2 = to_double("beta2", *v);
  if (auto v = take("adamm_floor")) cfg.adamm_floor = to_double("adamm_floor", *v);
  if (auto v = take("mu_init")) cfg.mu_init = *v;
  if (auto v = take("reward_sign")) {
    const long s = to_long("reward_sign", *v);
    if (s != 1 && s != -1) bad("reward_sign", "must be +1 or -1");
    cfg.reward_sign = static_cast<int>(s);
  }
  if (auto v = take("normalize_vstar")) cfg.normalize_vstar = to_bool("normalize_vstar", *v);
  std::optional<std::string> seed_value = take("seed");
  if (auto v = take("budget")) cfg.budget = to_long("budget", *v);
  if (auto v = take("horizon")) cfg.horizon = to_long("horizon", *v);

  if (!kv.empty()) bad(kv.begin()->first, "unknown key");

  // required keys
  if (cfg.objective.empty()) bad("objective", "required key missing");
  if (cfg.optimizer.empty()) bad("optimizer", "required key missing");
  if (!seed_value) bad("seed", "required key missing");
  cfg.seed = to_u64("seed", *seed_value);

  // constraints
  if (cfg.objective != "quadratic" && cfg.objective != "least_squares" &&
      cfg.objective != "logistic") {
    bad("objective", "must be quadratic | least_squares | logistic");
  }
  if (cfg.objective == "quadratic") {
    if (cfg.dim <= 0) bad("dim", "quadratic objective needs dim > 0");
    if (!(cfg.quad_cond >= 1.0)) bad("quad_cond", "must be >= 1");
  } else if (cfg.data_path.empty()) {
    bad("data", "required for data-backed objectives");
  }
  if (cfg.optimizer != "ldsd" && cfg.optimizer != "dgd" &&
      cfg.optimizer != "zo_ldsd" && cfg.optimizer != "zo_sgd" &&
      cfg.optimizer != "zo_adamm" && cfg.optimizer != "zo_jaguar") {
    bad("optimizer", "must be ldsd | dgd | zo_ldsd | zo_sgd | zo_adamm | zo_jaguar");
  }
  if (cfg.k < 1) bad("K", "must be >= 1");
  if (cfg.optimizer == "zo_ldsd" && cfg.k < 2) bad("K", "zo_ldsd needs K >= 2");
  if ((cfg.optimizer == "ldsd") && cfg.gamma_mu > 0.0 && cfg.k < 2) {
    bad("K", "ldsd needs K >= 2 when gamma_mu > 0");
  }
  if (!(cfg.tau > 0.0)) bad("tau", "must be positive");
  if (!(cfg.epsilon > 0.0)) bad("epsilon", "must be positive");
  if (!(cfg.gamma_x > 0.0)) bad("gamma_x", "must be positive");
  if (cfg.gamma_mu < 0.0) bad("gamma_mu", "must be nonnegative");
  if (cfg.schedule != "constant" && cfg.schedule != "cosine") {
    bad("schedule", "must be constant | cosine");
  }
  if (cfg.plugin != "sgd_momentum" && cfg.plugin != "adamm" &&
      cfg.plugin != "jaguar_sign") {
    bad("plugin", "must be sgd_momentum | adamm | jaguar_sign");
  }
  if (cfg.beta < 0.0 || cfg.beta >= 1.0) bad("beta", "must lie in [0, 1)");
  if (cfg.beta1 < 0.0 || cfg.beta1 >= 1.0) bad("beta1", "must lie in [0, 1)");
  if (cfg.beta2 < 0.0 || cfg.beta2 >= 1.0) bad("beta2", "must lie in [0, 1)");
  if (!(cfg.adamm_floor > 0.0)) bad("adamm_floor", "must be positive");
  if (cfg.mu_init != "random_unit" && cfg.mu_init != "collinear" &&
      cfg.mu_init != "zero") {
    bad("mu_init", "must be random_unit | collinear | zero");
  }
  if (cfg.budget.has_value() == cfg.horizon.has_value()) {
    bad("budget", "exactly one of budget / horizon must be set");
  }
  if (cfg.budget && *cfg.budget <= 0) bad("budget", "must be positive");
  if (cfg.horizon && *cfg.horizon <= 0) bad("horizon", "must be positive");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string run_id_for(const RunConfig& config, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001b3ull;
  };
  for (unsigned char c : config.raw_text) mix(c);
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(seed >> (8 * i)));
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ObjectiveOracle build_objective(const RunConfig& config) {
  if (config.objective == "quadratic") {
    Vector diag(config.dim);
    for (int i = 0; i < config.dim; ++i) {
      // log-spaced from 1 down to 1/cond
      const double t = config.dim == 1 ? 0.0
                                       : static_cast<double>(i) /
                                             static_cast<double>(config.dim - 1);
      diag[i] = std::pow(config.quad_cond, -t);
    }
    const Vector shift = Vector::Constant(config.dim, config.quad_shift);
    return quadratic_objective(diag, shift);
  }
  Dataset data = load_libsvm(config.data_path);
  if (config.add_intercept) data = with_intercept(std::move(data));
  if (config.objective == "least_squares") return least_squares_objective(data);
  return logistic_objective(data);
}

RunSpec to_run_spec(const RunConfig& config) {
  RunSpec spec;
  if (config.optimizer == "ldsd") spec.kind = OptKind::kLdsd;
  else if (config.optimizer == "dgd") spec.kind = OptKind::kDgd;
  else if (config.optimizer == "zo_ldsd") spec.kind = OptKind::kZoLdsd;
  else if (config.optimizer == "zo_sgd") spec.kind = OptKind::kZoSgd;
  else if (config.optimizer == "zo_adamm") spec.kind = OptKind::kZoAdamm;
  else if (config.optimizer == "zo_jaguar") spec.kind = OptKind::kZoJaguar;
  else throw std::runtime_error("config: optimizer: unknown kind");

  spec.k = config.k;
  spec.tau = config.tau;
  spec.epsilon = config.epsilon;
  spec.steps.gamma_x = config.gamma_x;
  spec.steps.gamma_mu = config.gamma_mu;
  spec.steps.schedule =
      config.schedule == "cosine" ? Schedule::kCosine : Schedule::kConstant;

  // Standalone baselines carry their own update rule; zo_ldsd uses whatever
  // plug-in the config names.
  if (spec.kind == OptKind::kZoSgd) spec.plugin.kind = PluginKind::kSgdMomentum;
  else if (spec.kind == OptKind::kZoAdamm) spec.plugin.kind = PluginKind::kAdamm;
  else if (spec.kind == OptKind::kZoJaguar) spec.plugin.kind = PluginKind::kJaguarSign;
  else if (config.plugin == "adamm") spec.plugin.kind = PluginKind::kAdamm;
  else if (config.plugin == "jaguar_sign") spec.plugin.kind = PluginKind::kJaguarSign;
  else spec.plugin.kind = PluginKind::kSgdMomentum;
  spec.plugin.beta = config.beta;
  spec.plugin.beta1 = config.beta1;
  spec.plugin.beta2 = config.beta2;
  spec.plugin.floor = config.adamm_floor;

  if (config.mu_init == "collinear") spec.mu_init = MuInit::kCollinear;
  else if (config.mu_init == "zero") spec.mu_init = MuInit::kZero;
  else spec.mu_init = MuInit::kRandomUnit;
  spec.reward_sign = config.reward_sign;
  spec.normalize_vstar = config.normalize_vstar;
  spec.seed = config.seed;
  spec.horizon = config.horizon;
  spec.budget = config.budget;
  return spec;
}

}  // namespace zoldsd
