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

#include "zoldsd/estimators.hpp"
#include "zoldsd/trace.hpp"

namespace zoldsd {

enum class Schedule { kConstant, kCosine };

struct StepSizes {
  double gamma_x = 0.0;
  double gamma_mu = 0.0;
  Schedule schedule = Schedule::kConstant;
};

/// gamma_x at iteration t; the cosine schedule needs the horizon T and leaves
/// gamma_mu untouched.
double scheduled_gamma_x(const StepSizes& steps, long t, long horizon);

enum class PluginKind { kSgdMomentum, kAdamm, kJaguarSign };

/// Pluggable x-update rule. The concrete update forms are fixed here so runs
/// are reproducible:
///   sgd_momentum: m <- beta m + g,                 delta = -gamma m
///   adamm:        m <- b1 m + (1-b1) g,
///                 s <- b2 s + (1-b2) g.*g,  bias-corrected,
///                 delta = -gamma mhat ./ (sqrt(shat) + floor)
///   jaguar_sign:  m <- beta m + (1-beta) g,        delta = -gamma sign(m)
struct PluginRule {
  PluginKind kind = PluginKind::kSgdMomentum;
  double beta = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double floor = 1e-8;
};

struct PluginBuffers {
  Vector m;  // momentum / first moment / sign-update buffer
  Vector s;  // adamm second moment
  bool initialized = false;
};

void init_plugin_buffers(PluginBuffers& buffers, Eigen::Index dim);

/// One plug-in update: mutates the buffers and returns delta_x. `t` is the
/// 1-based step count used for adamm bias correction. Buffers must have been
/// initialized to zero at t = 0.
Vector apply_plugin(const PluginRule& rule, PluginBuffers& buffers,
                    const Vector& g, double gamma, long t);

/// Mutable loop state: iterate, policy, plug-in buffers and exact counters.
struct OptimizerState {
  Vector x;
  SamplingPolicy policy;
  PluginBuffers buffers;
  long t = 0;
  long oracle_calls = 0;
  long skipped_steps = 0;
  long degenerate_resamples = 0;
};

/// Per-step telemetry handed back to the run driver (not part of the oracle
/// budget).
struct StepDiag {
  Vector g_x;                          // estimator actually applied to x
  std::optional<Vector> grad_pre;      // exact gradient at the pre-step x
  std::optional<double> mc_alignment;  // batch mean of alignment(v_k, grad)
  bool skipped = false;
};

/// Directional-derivative step: samples K directions from the policy, takes
/// the K-sample projection step on x and a REINFORCE ascent step on mu with
/// alignment rewards C_k = alignment(v_k, grad f(x)) against the mean
/// baseline. Costs K directional-oracle calls. Requires an exact-gradient
/// oracle and K >= 2 whenever gamma_mu > 0. A vanishing gradient skips the
/// step (recorded in the state).
StepDiag ldsd_step(OptimizerState& state, const ObjectiveOracle& oracle,
                   const StepSizes& steps, int k, long horizon, Rng& rng);

/// Forward-only step: K forward probes select v*, the two-point estimate
/// along v* (reusing the cached probe) drives the plug-in x-update, and the
/// leave-one-out REINFORCE estimate updates mu. Costs exactly K + 1 oracle
/// calls. Requires K >= 2 and tau > 0. `normalize_vstar` switches g_x to the
/// unit direction; the default keeps v* unnormalized.
StepDiag zo_ldsd_step(OptimizerState& state, const ObjectiveOracle& oracle,
                      const StepSizes& steps, int k, double tau,
                      const PluginRule& plugin, int reward_sign,
                      bool normalize_vstar, long horizon, Rng& rng);

/// Classical zeroth-order baseline with mu fixed at 0. K = 1 uses the central
/// two-point estimate (2 calls); K >= 2 averages forward differences against
/// a shared anchor f(x) (K + 1 calls), matching the equal-budget comparison
/// protocol.
StepDiag zo_baseline_step(OptimizerState& state, const ObjectiveOracle& oracle,
                          const StepSizes& steps, int k, double tau,
                          const PluginRule& plugin, long horizon, Rng& rng);

enum class OptKind { kLdsd, kDgd, kZoLdsd, kZoSgd, kZoAdamm, kZoJaguar };
enum class MuInit { kRandomUnit, kCollinear, kZero };

/// Everything run() needs besides the objective. Exactly one of horizon /
/// budget must be set.
struct RunSpec {
  OptKind kind = OptKind::kZoLdsd;
  int k = 5;
  double tau = 1e-3;
  double epsilon = 1.0;
  StepSizes steps;
  PluginRule plugin;
  int reward_sign = -1;
  bool normalize_vstar = false;
  MuInit mu_init = MuInit::kRandomUnit;
  std::uint64_t seed = 0;
  std::optional<long> horizon;
  std::optional<long> budget;
};

/// Oracle calls consumed by one iteration of the configured method.
long calls_per_iteration(const RunSpec& spec);

/// Runs the configured loop until the iteration horizon or the oracle budget
/// is exhausted, emitting one TraceRecord per iteration. Loss / gradient
/// telemetry is evaluated out of budget (the counters track only the
/// optimizer's own oracle consumption). Deterministic for fixed spec + seed.
Trace run(const RunSpec& spec, const ObjectiveOracle& oracle,
          const std::string& run_id);

}  // namespace zoldsd
