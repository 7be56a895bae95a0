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

"""Zeroth-order optimization with a learnable direction-sampling policy."""

from ._core import (  # noqa: F401
    AlignmentEstimate,
    BaselineKind,
    BestDirection,
    Dataset,
    DynamicsConfig,
    DynamicsReport,
    MuGradEstimate,
    ObjectiveOracle,
    ProbeSet,
    PsiProbe,
    Rng,
    SamplingPolicy,
    alignment,
    dgd_estimate,
    dynamics_check,
    dynamics_floor,
    fd_grad_expected_alignment,
    landscape_grid,
    least_squares_objective,
    load_libsvm,
    log_density_grad,
    logistic_objective,
    mc_expected_alignment,
    normalize,
    numeric_hessian_psi,
    parse_config,
    parse_libsvm,
    psi_alignment,
    quadratic_objective,
    random_unit,
    reinforce_mu_grad_loo,
    reinforce_mu_grad_mean,
    run_from_config,
    run_with_oracle,
    sample_directions,
    select_best_direction,
    to_libsvm,
    two_point,
    unit_with_cos,
    with_intercept,
    zo_gradient,
)

__all__ = [name for name in dir() if not name.startswith("_")]
