#include <cmath>

#include <doctest.h>

#include "test_util.hpp"
#include "zoldsd/optimizer.hpp"

using namespace zoldsd;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

OptimizerState make_state(const Vector& x, const Vector& mu, double epsilon) {
  OptimizerState state;
  state.x = x;
  state.policy = SamplingPolicy{mu, epsilon};
  init_plugin_buffers(state.buffers, x.size());
  return state;
}

}  // namespace

TEST_CASE("apply_plugin update rules") {
  PluginBuffers buffers;
  init_plugin_buffers(buffers, 2);

  PluginRule momentum;
  momentum.kind = PluginKind::kSgdMomentum;
  momentum.beta = 0.0;
  CHECK(apply_plugin(momentum, buffers, vec2(1, 2), 0.1, 1)
            .isApprox(vec2(-0.1, -0.2)));

  PluginRule jaguar;
  jaguar.kind = PluginKind::kJaguarSign;
  jaguar.beta = 0.0;
  init_plugin_buffers(buffers, 2);
  CHECK(apply_plugin(jaguar, buffers, vec2(0.3, -0.2), 0.01, 1)
            .isApprox(vec2(-0.01, 0.01)));

  // adamm first step: bias correction cancels, delta ~ -gamma g / (|g| + floor)
  PluginRule adamm;
  adamm.kind = PluginKind::kAdamm;
  init_plugin_buffers(buffers, 2);
  const Vector g = vec2(0.8, -0.05);
  const Vector delta = apply_plugin(adamm, buffers, g, 0.1, 1);
  for (int i = 0; i < 2; ++i) {
    CHECK(delta[i] ==
          doctest::Approx(-0.1 * g[i] / (std::abs(g[i]) + adamm.floor)));
  }

  PluginBuffers uninitialized;
  CHECK_THROWS_AS(apply_plugin(momentum, uninitialized, vec2(1, 1), 0.1, 1),
                  std::invalid_argument);
}

TEST_CASE("momentum accumulates across steps") {
  PluginBuffers buffers;
  init_plugin_buffers(buffers, 1);
  PluginRule rule;
  rule.kind = PluginKind::kSgdMomentum;
  rule.beta = 0.5;
  apply_plugin(rule, buffers, Vector::Ones(1), 1.0, 1);
  const Vector second = apply_plugin(rule, buffers, Vector::Ones(1), 1.0, 2);
  CHECK(second[0] == doctest::Approx(-1.5));  // m = 0.5 * 1 + 1
}

TEST_CASE("cosine schedule decays gamma_x and leaves gamma_mu alone") {
  StepSizes steps;
  steps.gamma_x = 2.0;
  steps.gamma_mu = 0.25;
  steps.schedule = Schedule::kCosine;
  CHECK(scheduled_gamma_x(steps, 0, 100) == doctest::Approx(2.0));
  CHECK(scheduled_gamma_x(steps, 50, 100) == doctest::Approx(1.0));
  CHECK(scheduled_gamma_x(steps, 99, 100) < 0.002);
  CHECK_THROWS_AS(scheduled_gamma_x(steps, 0, 0), std::invalid_argument);
  CHECK(steps.gamma_mu == 0.25);

  steps.schedule = Schedule::kConstant;
  CHECK(scheduled_gamma_x(steps, 73, 0) == doctest::Approx(2.0));
}

TEST_CASE("ldsd_step with a collinear direction is an exact gradient step") {
  const auto oracle = quadratic_objective(Vector::Ones(2), Vector::Zero(2));
  const Vector x0 = vec2(3, 4);
  // mu parallel to grad f(x0) = x0 and epsilon ~ 0: the draw equals mu
  auto state = make_state(x0, 0.5 * x0, 1e-300);
  StepSizes steps;
  steps.gamma_x = 0.25;
  steps.gamma_mu = 0.0;
  Rng rng(1);
  const auto diag = ldsd_step(state, oracle, steps, 1, 10, rng);
  CHECK(state.x.isApprox(Vector(x0 - 0.25 * x0)));
  CHECK(state.oracle_calls == 1);
  CHECK(diag.mc_alignment.has_value());
  CHECK(*diag.mc_alignment == doctest::Approx(1.0));
}

TEST_CASE("ldsd_step with gamma_x = 0 still learns mu") {
  const auto oracle = quadratic_objective(Vector::Ones(2), Vector::Zero(2));
  auto state = make_state(vec2(1, 2), vec2(1, 0), 0.5);
  const Vector mu_before = state.policy.mu;
  StepSizes steps;
  steps.gamma_x = 0.0;
  steps.gamma_mu = 0.1;
  Rng rng(2);
  ldsd_step(state, oracle, steps, 4, 10, rng);
  CHECK(state.x.isApprox(vec2(1, 2)));
  CHECK((state.policy.mu - mu_before).norm() > 0.0);
}

TEST_CASE("ldsd_step at stationarity skips and records") {
  const auto oracle = quadratic_objective(Vector::Ones(2), vec2(1, 1));
  auto state = make_state(vec2(1, 1), vec2(1, 0), 0.5);  // grad = 0 here
  StepSizes steps;
  steps.gamma_x = 0.1;
  steps.gamma_mu = 0.0;
  Rng rng(3);
  const auto diag = ldsd_step(state, oracle, steps, 1, 10, rng);
  CHECK(diag.skipped);
  CHECK(state.skipped_steps == 1);
  CHECK(state.oracle_calls == 0);
  CHECK(state.x.isApprox(vec2(1, 1)));
}

TEST_CASE("ldsd_step preconditions") {
  ObjectiveOracle gradless;
  gradless.dim = 2;
  gradless.value = [](const Vector& x) { return x.squaredNorm(); };
  auto state = make_state(vec2(1, 1), vec2(1, 0), 0.5);
  StepSizes steps;
  steps.gamma_x = 0.1;
  Rng rng(4);
  CHECK_THROWS_AS(ldsd_step(state, gradless, steps, 1, 10, rng),
                  std::invalid_argument);

  const auto oracle = quadratic_objective(Vector::Ones(2), Vector::Zero(2));
  steps.gamma_mu = 0.1;
  CHECK_THROWS_AS(ldsd_step(state, oracle, steps, 1, 10, rng),
                  std::invalid_argument);  // K = 1 with mu learning on
}

TEST_CASE("zo_ldsd_step spends exactly K + 1 calls and matches Line-7 form") {
  const auto quad = quadratic_objective(Vector::Ones(2), Vector::Zero(2));
  testing::CountingOracle counted(quad);
  auto state = make_state(vec2(1, 2), vec2(0.5, 0), 0.3);
  StepSizes steps;
  steps.gamma_x = 0.05;
  steps.gamma_mu = 0.0;
  PluginRule plain;
  plain.kind = PluginKind::kSgdMomentum;
  plain.beta = 0.0;

  Rng rng(5);
  const Vector x_before = state.x;
  const auto diag =
      zo_ldsd_step(state, counted.oracle, steps, 5, 1e-3, plain, -1, false, 10, rng);
  CHECK(*counted.value_calls == 6);
  CHECK(state.oracle_calls == 6);
  // beta = 0 momentum reduces to x - gamma g_x
  CHECK(state.x.isApprox(Vector(x_before - 0.05 * diag.g_x)));
  CHECK_THROWS_AS(
      zo_ldsd_step(state, counted.oracle, steps, 1, 1e-3, plain, -1, false, 10, rng),
      std::invalid_argument);
}

TEST_CASE("zo_ldsd_step on a constant objective moves nothing") {
  ObjectiveOracle flat;
  flat.dim = 2;
  flat.value = [](const Vector&) { return 7.0; };
  auto state = make_state(vec2(1, 2), vec2(0.5, 0), 0.3);
  const Vector mu_before = state.policy.mu;
  StepSizes steps;
  steps.gamma_x = 0.05;
  steps.gamma_mu = 0.01;
  PluginRule plain;
  plain.beta = 0.0;
  Rng rng(6);
  const auto diag = zo_ldsd_step(state, flat, steps, 5, 1e-3, plain, -1, false, 10, rng);
  CHECK(diag.g_x.norm() == doctest::Approx(0.0));
  CHECK(state.x.isApprox(vec2(1, 2)));
  CHECK(state.policy.mu.isApprox(mu_before));  // all LOO advantages vanish
}

TEST_CASE("zo_baseline_step call accounting") {
  const auto quad = quadratic_objective(Vector::Ones(3), Vector::Zero(3));
  StepSizes steps;
  steps.gamma_x = 0.01;
  PluginRule plain;
  plain.beta = 0.0;

  testing::CountingOracle two_call(quad);
  auto state = make_state(Vector::Ones(3), Vector::Zero(3), 1.0);
  Rng rng(7);
  zo_baseline_step(state, two_call.oracle, steps, 1, 1e-3, plain, 10, rng);
  CHECK(*two_call.value_calls == 2);
  CHECK(state.oracle_calls == 2);

  testing::CountingOracle anchored(quad);
  auto state5 = make_state(Vector::Ones(3), Vector::Zero(3), 1.0);
  zo_baseline_step(state5, anchored.oracle, steps, 5, 1e-3, plain, 10, rng);
  CHECK(*anchored.value_calls == 6);
  CHECK(state5.oracle_calls == 6);
}

TEST_CASE("run respects budgets exactly") {
  RunSpec spec;
  spec.kind = OptKind::kZoLdsd;
  spec.k = 5;
  spec.epsilon = 0.5;
  spec.steps.gamma_x = 0.01;
  spec.steps.gamma_mu = 1e-3;
  spec.seed = 11;
  spec.budget = 60;
  const auto oracle = quadratic_objective(Vector::Ones(4), Vector::Zero(4));

  const Trace trace = run(spec, oracle, "test");
  CHECK(trace.size() == 10);  // 6 calls per iteration
  CHECK(trace.back().oracle_calls == 60);

  RunSpec baseline = spec;
  baseline.kind = OptKind::kZoSgd;
  baseline.k = 1;
  const Trace base_trace = run(baseline, oracle, "test");
  CHECK(base_trace.size() == 30);  // 2 calls per iteration, 3x the iterations
  CHECK(base_trace.back().oracle_calls == 60);
}

TEST_CASE("run validates its configuration") {
  RunSpec spec;
  spec.kind = OptKind::kZoLdsd;
  spec.seed = 1;
  const auto oracle = quadratic_objective(Vector::Ones(2), Vector::Zero(2));
  CHECK_THROWS_AS(run(spec, oracle, "x"), std::invalid_argument);  // neither
  spec.budget = 60;
  spec.horizon = 10;
  CHECK_THROWS_AS(run(spec, oracle, "x"), std::invalid_argument);  // both
  spec.horizon.reset();
  spec.budget = 3;  // below one iteration's cost (K + 1 = 6)
  CHECK_THROWS_AS(run(spec, oracle, "x"), std::invalid_argument);

  RunSpec directional;
  directional.kind = OptKind::kLdsd;
  directional.horizon = 5;
  ObjectiveOracle gradless;
  gradless.dim = 2;
  gradless.value = [](const Vector& x) { return x.squaredNorm(); };
  CHECK_THROWS_AS(run(directional, gradless, "x"), std::invalid_argument);
}

TEST_CASE("run is deterministic for a fixed seed and spec") {
  RunSpec spec;
  spec.kind = OptKind::kLdsd;
  spec.k = 5;
  spec.epsilon = 0.1;
  spec.steps.gamma_x = 0.05;
  spec.steps.gamma_mu = 1e-3;
  spec.seed = 7;
  spec.horizon = 50;
  const auto oracle = quadratic_objective(Vector::Ones(6), Vector::Ones(6));
  const Trace a = run(spec, oracle, "same");
  const Trace b = run(spec, oracle, "same");
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].loss == b[i].loss);
    CHECK(a[i].mu_norm == b[i].mu_norm);
    CHECK(*a[i].grad_norm == *b[i].grad_norm);
    CHECK(a[i].oracle_calls == b[i].oracle_calls);
  }
  RunSpec other = spec;
  other.seed = 8;
  const Trace c = run(other, oracle, "same");
  CHECK(c.back().loss != a.back().loss);
}

TEST_CASE("oracle-call accounting matches the analytic formula") {
  Rng rng(31);
  const auto oracle = quadratic_objective(Vector::Ones(3), Vector::Ones(3));
  const OptKind kinds[] = {OptKind::kLdsd, OptKind::kDgd, OptKind::kZoLdsd,
                           OptKind::kZoSgd, OptKind::kZoAdamm,
                           OptKind::kZoJaguar};
  for (int trial = 0; trial < 40; ++trial) {
    RunSpec spec;
    spec.kind = kinds[rng.next_u64() % 6];
    spec.k = 1 + static_cast<int>(rng.next_u64() % 6);
    if (spec.kind == OptKind::kZoLdsd || spec.kind == OptKind::kLdsd) {
      spec.k = std::max(spec.k, 2);
    }
    spec.epsilon = 0.5;
    spec.steps.gamma_x = 1e-3;
    spec.steps.gamma_mu = spec.kind == OptKind::kLdsd || spec.kind == OptKind::kZoLdsd
                              ? 1e-4
                              : 0.0;
    spec.seed = rng.next_u64();
    const long horizon = 1 + static_cast<long>(rng.next_u64() % 12);
    spec.horizon = horizon;
    const Trace trace = run(spec, oracle, "prop");
    CHECK(trace.back().oracle_calls == horizon * calls_per_iteration(spec));
    // monotone and exact per record
    for (std::size_t i = 0; i < trace.size(); ++i) {
      CHECK(trace[i].oracle_calls ==
            static_cast<long>(i + 1) * calls_per_iteration(spec));
    }
  }
}

TEST_CASE("baseline alignment sits at the 1/d level") {
  for (int d : {16, 64, 256}) {
    RunSpec spec;
    spec.kind = OptKind::kDgd;
    spec.k = 1;
    spec.epsilon = 1.0;
    spec.steps.gamma_x = 1e-4;
    spec.seed = 100 + d;
    spec.horizon = 10000;
    const auto oracle =
        quadratic_objective(Vector::Ones(d), Vector::Ones(d));
    const Trace trace = run(spec, oracle, "corollary");
    double mean_alignment = 0.0;
    long n = 0;
    for (const auto& rec : trace) {
      if (rec.mc_alignment) {
        mean_alignment += *rec.mc_alignment;
        ++n;
      }
    }
    mean_alignment /= static_cast<double>(n);
    CHECK(mean_alignment * d >= 0.8);
    CHECK(mean_alignment * d <= 1.2);
  }
}

TEST_CASE("collinear initialization keeps the alignment above the 1/5 floor") {
  const int d = 16;
  const auto oracle = quadratic_objective(Vector::Ones(d), Vector::Ones(d));
  const double l = *oracle.smoothness;
  const double delta = 0.25;
  RunSpec spec;
  spec.kind = OptKind::kLdsd;
  spec.k = 5;
  spec.mu_init = MuInit::kCollinear;
  // schedules from the growth analysis: eps = d^(-3/2) delta M / 960,
  // gamma_mu = ||mu||^2 / 640 with ||mu0|| = 1, gamma_x = delta^2 / (3 2^14 5^2 L)
  spec.epsilon = std::pow(d, -1.5) * delta / 960.0;
  spec.steps.gamma_mu = 1.0 / 640.0;
  spec.steps.gamma_x = delta * delta / (3.0 * 16384.0 * 25.0 * l);
  spec.seed = 9;
  spec.horizon = 500;
  const Trace trace = run(spec, oracle, "collinear");
  for (const auto& rec : trace) {
    REQUIRE(rec.mc_alignment.has_value());
    CHECK(*rec.mc_alignment >= 0.2 - 0.01);
  }
}

TEST_CASE("descent accounting stays within the telescoping bound") {
  // Pathwise consequence of smoothness for the directional update: the
  // weighted sum of alignment-scaled gradient norms telescopes against
  // f(x0) - f(x*), for every realization.
  const int d = 8;
  Vector diag(d);
  for (int i = 0; i < d; ++i) diag[i] = 0.5 + 0.25 * i;
  const auto oracle = quadratic_objective(diag, Vector::Zero(d));
  const double l = *oracle.smoothness;
  const double gamma = 1.0 / (2.0 * l);
  const long horizon = 400;

  int violations = 0;
  for (int seed = 0; seed < 50; ++seed) {
    OptimizerState state;
    state.x = Vector::Ones(d);
    state.policy = SamplingPolicy{Vector::Zero(d), 1.0};
    init_plugin_buffers(state.buffers, d);
    StepSizes steps;
    steps.gamma_x = gamma;
    Rng rng = Rng::stream(static_cast<std::uint64_t>(seed), 0);

    const double f0 = oracle.value(state.x);
    double lhs = 0.0;
    for (long t = 0; t < horizon; ++t) {
      const auto diag_step = ldsd_step(state, oracle, steps, 1, horizon, rng);
      if (diag_step.skipped) continue;
      const double c_t = *diag_step.mc_alignment;
      const double g2 = diag_step.grad_pre->squaredNorm();
      lhs += (gamma - l * gamma * gamma / 2.0) * c_t * g2;
    }
    lhs /= static_cast<double>(horizon);
    const double rhs = f0 / static_cast<double>(horizon);  // f* = 0
    if (lhs > rhs * (1.0 + 1e-9)) ++violations;
  }
  CHECK(violations == 0);
}
