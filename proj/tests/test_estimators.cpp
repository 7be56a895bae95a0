#include <cmath>

#include <doctest.h>

#include "test_util.hpp"
#include "zoldsd/estimators.hpp"

using namespace zoldsd;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

ObjectiveOracle constant_oracle(Eigen::Index dim, double c) {
  ObjectiveOracle oracle;
  oracle.dim = dim;
  oracle.value = [c](const Vector&) { return c; };
  return oracle;
}

ObjectiveOracle half_sq_norm(Eigen::Index dim) {
  return quadratic_objective(Vector::Ones(dim), Vector::Zero(dim));
}

}  // namespace

TEST_CASE("two_point basics") {
  const auto constant = constant_oracle(2, 3.25);
  CHECK(two_point(constant, vec2(1, 2), vec2(0.3, -0.7), 0.05) ==
        doctest::Approx(0.0));

  // central differences are exact on quadratics: <x, v> here
  const auto quad = half_sq_norm(2);
  for (double tau : {1.0, 0.1, 1e-3}) {
    CHECK(two_point(quad, vec2(1, 0), vec2(2, 1), tau) == doctest::Approx(2.0));
  }
  CHECK_THROWS_AS(two_point(quad, vec2(1, 0), vec2(2, 1), 0.0),
                  std::invalid_argument);

  ObjectiveOracle bad;
  bad.dim = 1;
  bad.value = [](const Vector&) { return std::nan(""); };
  CHECK_THROWS_AS(two_point(bad, Vector::Zero(1), Vector::Ones(1), 0.1),
                  std::runtime_error);
}

TEST_CASE("two_point error is O(tau^2) on the quartic") {
  ObjectiveOracle quartic;
  quartic.dim = 1;
  quartic.value = [](const Vector& x) { return std::pow(x[0], 4.0); };
  const Vector x = Vector::Ones(1);
  const Vector v = Vector::Ones(1);
  const double err_01 = std::abs(two_point(quartic, x, v, 0.1) - 4.0);
  const double err_001 = std::abs(two_point(quartic, x, v, 0.01) - 4.0);
  const double ratio = err_01 / err_001;
  CHECK(ratio >= 50.0);
  CHECK(ratio <= 200.0);

  // error shrinks monotonically across decades of tau
  double prev = std::abs(two_point(quartic, x, v, 1e-1) - 4.0);
  for (double tau : {1e-2, 1e-3}) {
    const double cur = std::abs(two_point(quartic, x, v, tau) - 4.0);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("two_point consumes exactly 2 oracle calls") {
  testing::CountingOracle counted(half_sq_norm(2));
  two_point(counted.oracle, vec2(1, 0), vec2(2, 1), 0.1);
  CHECK(*counted.value_calls == 2);
}

TEST_CASE("dgd_estimate projects onto unit directions") {
  Vector grad = vec2(1, 0);
  CHECK(dgd_estimate(grad, {vec2(2, 0)}).isApprox(vec2(1, 0)));  // collinear
  CHECK(dgd_estimate(grad, {vec2(0, 5)}).norm() == doctest::Approx(0.0));
  const Vector avg = dgd_estimate(grad, {vec2(1, 0), vec2(0, 1)});
  CHECK(avg.isApprox(vec2(0.5, 0.0)));
  CHECK_THROWS_AS(dgd_estimate(grad, {vec2(0, 0)}), std::invalid_argument);
  CHECK_THROWS_AS(dgd_estimate(grad, {}), std::invalid_argument);
}

TEST_CASE("mean-baseline REINFORCE estimator") {
  SamplingPolicy policy{Vector::Zero(2), 0.5};

  // equal rewards: centered advantages vanish
  Rng rng(3);
  const auto dirs = sample_directions(policy, 4, rng);
  const auto est = reinforce_mu_grad_mean(policy, dirs, {1.0, 1.0, 1.0, 1.0});
  CHECK(est.g_mu.norm() == doctest::Approx(0.0));

  // K = 2 symmetric probe, hand-evaluated closed form: e1 / (2 eps)
  const double eps = 0.5;
  SamplingPolicy p2{vec2(0.3, -0.2), eps};
  const Vector e1 = vec2(1, 0);
  const std::vector<Vector> pair = {p2.mu + eps * e1, p2.mu - eps * e1};
  const auto hand = reinforce_mu_grad_mean(p2, pair, {1.0, 0.0});
  CHECK(hand.g_mu.isApprox(Vector(e1 / (2.0 * eps))));
  CHECK(hand.advantages[0] == doctest::Approx(0.5));
  CHECK(hand.advantages[1] == doctest::Approx(-0.5));

  CHECK_THROWS_AS(reinforce_mu_grad_mean(policy, {dirs[0]}, {1.0}),
                  std::invalid_argument);
}

TEST_CASE("mean-baseline advantages sum to zero") {
  Rng rng(11);
  SamplingPolicy policy{rng.normal_vector(5), 0.8};
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(rng.next_u64() % 7);
    const auto dirs = sample_directions(policy, k, rng);
    std::vector<double> rewards;
    double max_abs = 0.0;
    for (int i = 0; i < k; ++i) {
      rewards.push_back(rng.normal());
      max_abs = std::max(max_abs, std::abs(rewards.back()));
    }
    const auto est = reinforce_mu_grad_mean(policy, dirs, rewards);
    double total = 0.0;
    for (double a : est.advantages) total += a;
    CHECK(std::abs(total) <= 1e-10 * k * std::max(1.0, max_abs));
  }
}

TEST_CASE("mean-baseline expectation carries the (K-1)/K factor") {
  // Rewards r = f(x + tau v) on a quadratic make the target analytic:
  // grad_mu E[r] = tau * diag .* (x + tau mu - shift).
  Rng rng(29);
  const int d = 4;
  const int k = 5;
  Vector diag(d), shift(d);
  for (int i = 0; i < d; ++i) {
    diag[i] = 0.5 + rng.uniform();
    shift[i] = rng.normal();
  }
  const auto oracle = quadratic_objective(diag, shift);
  const Vector x = rng.normal_vector(d);
  SamplingPolicy policy{rng.normal_vector(d), 0.4};
  const double tau = 0.3;
  const Vector target =
      tau * (diag.array() * (x + tau * policy.mu - shift).array()).matrix();

  const std::int64_t n = 400000;
  Vector mean = Vector::Zero(d);
  Vector m2 = Vector::Zero(d);
  std::vector<double> rewards(k);
  for (std::int64_t e = 0; e < n; ++e) {
    const auto dirs = sample_directions(policy, k, rng);
    for (int i = 0; i < k; ++i) rewards[i] = oracle.value(x + tau * dirs[i]);
    const Vector est = reinforce_mu_grad_mean(policy, dirs, rewards).g_mu;
    mean += est;
    m2 += est.cwiseProduct(est);
  }
  mean /= static_cast<double>(n);
  m2 /= static_cast<double>(n);
  const Vector se =
      ((m2 - mean.cwiseProduct(mean)).cwiseMax(0.0) / static_cast<double>(n))
          .cwiseSqrt();
  const Vector scaled_target = (double(k - 1) / k) * target;
  for (int i = 0; i < d; ++i) {
    CHECK(std::abs(mean[i] - scaled_target[i]) <= 5.0 * se[i]);
    // and decisively not the unscaled gradient
    CHECK(std::abs(mean[i] - target[i]) > 5.0 * se[i]);
  }
}

TEST_CASE("leave-one-out REINFORCE estimator") {
  const double eps = 0.7;
  SamplingPolicy policy{vec2(0.2, 0.1), eps};
  Rng rng(13);

  ProbeSet equal;
  equal.tau = 0.1;
  equal.directions = sample_directions(policy, 3, rng);
  equal.forward_values = {2.0, 2.0, 2.0};
  CHECK(reinforce_mu_grad_loo(policy, equal, 1).g_mu.norm() ==
        doctest::Approx(0.0));

  ProbeSet two;
  two.tau = 0.1;
  two.directions = sample_directions(policy, 2, rng);
  two.forward_values = {3.0, 1.25};
  const auto loo = reinforce_mu_grad_loo(policy, two, 1);
  CHECK(loo.advantages[0] == doctest::Approx(3.0 - 1.25));
  CHECK(loo.advantages[1] == doctest::Approx(1.25 - 3.0));

  // K = 2 identity: the LOO advantage doubles the mean-baseline one
  const auto mean_version =
      reinforce_mu_grad_mean(policy, two.directions, two.forward_values);
  CHECK(loo.g_mu.isApprox(Vector(2.0 * mean_version.g_mu)));

  ProbeSet single;
  single.tau = 0.1;
  single.directions = {vec2(1, 0)};
  single.forward_values = {1.0};
  CHECK_THROWS_AS(reinforce_mu_grad_loo(policy, single, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(reinforce_mu_grad_loo(policy, two, 0), std::invalid_argument);
}

TEST_CASE("LOO / mean equivalence holds on random inputs at K = 2") {
  Rng rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    SamplingPolicy policy{rng.normal_vector(3), 0.3 + rng.uniform()};
    ProbeSet probes;
    probes.tau = 0.2;
    probes.directions = sample_directions(policy, 2, rng);
    probes.forward_values = {rng.normal(), rng.normal()};
    const auto loo = reinforce_mu_grad_loo(policy, probes, -1);
    std::vector<double> negated = {-probes.forward_values[0],
                                   -probes.forward_values[1]};
    const auto mean_version =
        reinforce_mu_grad_mean(policy, probes.directions, negated);
    CHECK((loo.g_mu - 2.0 * mean_version.g_mu).norm() <=
          1e-12 * std::max(1.0, loo.g_mu.norm()));
  }
}

TEST_CASE("select_best_direction") {
  ObjectiveOracle linear;
  linear.dim = 2;
  linear.value = [](const Vector& x) { return x[0]; };

  // sole direction
  testing::CountingOracle counted_single(linear);
  const auto single =
      select_best_direction(counted_single.oracle, vec2(0, 0), {vec2(0, 1)}, 1.0);
  CHECK(single.index == 0);
  CHECK(*counted_single.value_calls == 1);

  // linear objective: the most negative forward probe wins
  testing::CountingOracle counted(linear);
  const auto best = select_best_direction(
      counted.oracle, vec2(0, 0), {vec2(1, 0), vec2(-1, 0), vec2(0, 1)}, 1.0);
  CHECK(best.index == 1);
  CHECK(best.probes.forward_values[1] == doctest::Approx(-1.0));
  CHECK(best.probes.forward_values.size() == 3);
  CHECK(*counted.value_calls == 3);

  // ties break toward the lowest index
  const auto tie = select_best_direction(constant_oracle(2, 1.0), vec2(0, 0),
                                         {vec2(1, 0), vec2(0, 1)}, 0.5);
  CHECK(tie.index == 0);
}

TEST_CASE("select_best_direction is permutation-covariant") {
  ObjectiveOracle bowl = half_sq_norm(3);
  Rng rng(23);
  const Vector x = rng.normal_vector(3);
  std::vector<Vector> dirs;
  for (int i = 0; i < 5; ++i) dirs.push_back(rng.normal_vector(3));
  const auto base = select_best_direction(bowl, x, dirs, 0.1);
  // rotate the list and check the winner moves with it
  for (std::size_t shift = 1; shift < dirs.size(); ++shift) {
    std::vector<Vector> rotated;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      rotated.push_back(dirs[(i + shift) % dirs.size()]);
    }
    const auto permuted = select_best_direction(bowl, x, rotated, 0.1);
    CHECK((permuted.index + shift) % dirs.size() == base.index);
  }
}

TEST_CASE("zo_gradient") {
  // constant objective: zero vector
  const auto flat = constant_oracle(2, 5.0);
  CHECK(zo_gradient(flat, vec2(0, 0), vec2(1, 2), 0.1).norm() ==
        doctest::Approx(0.0));

  // linear objective: <a, v> * v exactly, any tau
  ObjectiveOracle linear;
  linear.dim = 2;
  linear.value = [](const Vector& x) { return 2.0 * x[0] - x[1]; };
  const Vector v = vec2(0.5, 1.5);
  CHECK(zo_gradient(linear, vec2(3, 1), v, 0.37).isApprox(Vector((2.0 * 0.5 - 1.5) * v)));

  // quadratic, hand value: 2 * (2, 1) = (4, 2)
  const auto quad = half_sq_norm(2);
  CHECK(zo_gradient(quad, vec2(1, 0), vec2(2, 1), 0.1).isApprox(vec2(4, 2)));

  // probe reuse spends one call, the cold path two
  testing::CountingOracle counted(quad);
  const double cached = counted.oracle.value(vec2(1, 0) + 0.1 * vec2(2, 1));
  *counted.value_calls = 0;
  zo_gradient(counted.oracle, vec2(1, 0), vec2(2, 1), 0.1, cached);
  CHECK(*counted.value_calls == 1);
  *counted.value_calls = 0;
  zo_gradient(counted.oracle, vec2(1, 0), vec2(2, 1), 0.1);
  CHECK(*counted.value_calls == 2);
}
