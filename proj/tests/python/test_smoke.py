# Copyright 2026 The zoldsd Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Smoke tests for the python bindings."""

import math
import os
import pathlib

import numpy as np
import pytest

import zoldsd


def data_path() -> str:
    env = os.environ.get("ZOLDSD_DATA_DIR")
    base = pathlib.Path(env) if env else (
        pathlib.Path(__file__).resolve().parents[2] / "data")
    return str(base / "synth_a9a.libsvm")


def test_quadratic_oracle():
    oracle = zoldsd.quadratic_objective(np.array([1.0, 1.0]), np.zeros(2))
    assert oracle.value(np.array([3.0, 4.0])) == pytest.approx(12.5)
    np.testing.assert_allclose(oracle.grad(np.array([3.0, 4.0])), [3.0, 4.0])
    assert oracle.smoothness == pytest.approx(1.0)


def test_python_callable_oracle():
    oracle = zoldsd.ObjectiveOracle(
        dim=2,
        value=lambda x: float(np.sum(x**2)) / 2.0,
        grad=lambda x: x,
    )
    v = np.array([2.0, 1.0])
    est = zoldsd.two_point(oracle, np.array([1.0, 0.0]), v, 0.1)
    assert est == pytest.approx(2.0)  # exact on quadratics
    gx = zoldsd.zo_gradient(oracle, np.array([1.0, 0.0]), v, 0.1)
    np.testing.assert_allclose(gx, [4.0, 2.0])


def test_sampling_and_alignment():
    rng = zoldsd.Rng(7)
    policy = zoldsd.SamplingPolicy(np.zeros(4), 1.0)
    dirs = zoldsd.sample_directions(policy, 3, rng)
    assert len(dirs) == 3

    rng_a = zoldsd.Rng.stream(5, 0)
    rng_b = zoldsd.Rng.stream(5, 0)
    da = zoldsd.sample_directions(policy, 2, rng_a)
    db = zoldsd.sample_directions(policy, 2, rng_b)
    np.testing.assert_array_equal(da[0], db[0])

    assert zoldsd.alignment(np.array([1.0, 1.0]), np.array([1.0, 0.0])) == \
        pytest.approx(0.5)
    u = zoldsd.normalize(np.array([3.0, 4.0]))
    np.testing.assert_allclose(u, [0.6, 0.8])


def test_libsvm_against_numpy_lstsq():
    data = zoldsd.load_libsvm(data_path())
    assert len(data) > 0
    x, y = data.dense()
    oracle = zoldsd.least_squares_objective(data)
    w = np.zeros(data.n_features)
    expected = 0.5 * np.mean((x @ w - y) ** 2)
    assert oracle.value(w) == pytest.approx(expected)
    expected_grad = x.T @ (x @ w - y) / len(y)
    np.testing.assert_allclose(oracle.grad(w), expected_grad, atol=1e-12)


def test_mc_alignment_saddle_level():
    d = 16
    policy = zoldsd.SamplingPolicy(np.zeros(d), 1.0)
    g = np.zeros(d)
    g[0] = 1.0
    rng = zoldsd.Rng(3)
    est = zoldsd.mc_expected_alignment(policy, g, 20000, rng)
    assert abs(est.mean - 1.0 / d) <= 4.0 * est.stderr


def test_run_from_config_budget_and_determinism():
    cfg = (
        "objective=quadratic\ndim=6\noptimizer=zo_ldsd\nseed=3\nbudget=120\n"
        "gamma_x=0.01\n"
    )
    trace = zoldsd.run_from_config(cfg)
    assert len(trace) == 20  # 6 oracle calls per iteration at K = 5
    assert trace[-1]["oracle_calls"] == 120
    again = zoldsd.run_from_config(cfg)
    assert [r["loss"] for r in trace] == [r["loss"] for r in again]


def test_run_with_python_oracle():
    calls = {"n": 0}

    def value(x):
        calls["n"] += 1
        return float(np.sum((x - 1.0) ** 2)) / 2.0

    oracle = zoldsd.ObjectiveOracle(dim=4, value=value)
    cfg = (
        "objective=quadratic\ndim=4\noptimizer=zo_sgd\nK=1\nseed=9\n"
        "horizon=200\ngamma_x=0.05\nbeta=0\ntau=1e-4\nepsilon=1\n"
    )
    trace = zoldsd.run_with_oracle(cfg, oracle)
    assert len(trace) == 200
    assert trace[-1]["oracle_calls"] == 400
    assert trace[-1]["loss"] < 0.1 * trace[0]["loss"]  # descends on the bowl
    assert trace[-1]["grad_norm"] is None  # value-only oracle
    # 2 counted probes per iteration plus 1 uncounted loss-telemetry call
    assert calls["n"] == 600


def test_hessian_probe_bound():
    rng = zoldsd.Rng(11)
    a = zoldsd.random_unit(8, rng)
    u = 2.0 * zoldsd.random_unit(8, rng)
    probe = zoldsd.numeric_hessian_psi(a, u)
    assert probe.hessian_norm <= probe.bound * (1 + 1e-3)
    assert probe.bound == pytest.approx(20.0 / np.dot(u, u))


def test_dynamics_floor_value():
    d, delta = 16, 0.4
    angle = delta / (32 * d) + math.acos(1 - delta)
    expected = math.cos(angle) ** 2 * (1 - math.exp(-1))
    assert zoldsd.dynamics_floor(delta, d) == pytest.approx(expected)


def test_dynamics_check_short_run():
    d = 16
    rng = zoldsd.Rng(5)
    g = zoldsd.random_unit(d, rng)
    mu0 = zoldsd.unit_with_cos(g, 0.5, rng)
    cfg = zoldsd.DynamicsConfig()
    cfg.horizon = 5
    cfg.n_per_estimate = 1000
    cfg.n_grad = 5000
    cfg.delta = 0.4
    cfg.seed = 7
    report = zoldsd.dynamics_check(g, mu0, cfg)
    assert len(report.series) == 6
    assert report.series[-1]["mean"] >= report.series[0]["mean"] - 1e-6
    assert report.monotone_fraction == pytest.approx(1.0)
