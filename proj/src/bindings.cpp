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

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "zoldsd/alignlab.hpp"
#include "zoldsd/bench.hpp"
#include "zoldsd/config.hpp"
#include "zoldsd/estimators.hpp"
#include "zoldsd/objective.hpp"
#include "zoldsd/optimizer.hpp"
#include "zoldsd/sampling.hpp"
#include "zoldsd/trace.hpp"

namespace py = pybind11;
using namespace zoldsd;

namespace {

ObjectiveOracle make_objective(Eigen::Index dim, py::function value,
                               py::object grad, py::object smoothness) {
  ObjectiveOracle oracle;
  oracle.dim = dim;
  oracle.value = [value](const Vector& x) { return value(x).cast<double>(); };
  if (!grad.is_none()) {
    py::function g = grad.cast<py::function>();
    oracle.grad = [g](const Vector& x) { return g(x).cast<Vector>(); };
  }
  if (!smoothness.is_none()) oracle.smoothness = smoothness.cast<double>();
  return oracle;
}

py::dict record_to_dict(const TraceRecord& r) {
  py::dict d;
  d["run_id"] = r.run_id;
  d["t"] = r.t;
  d["oracle_calls"] = r.oracle_calls;
  d["loss"] = r.loss;
  d["grad_norm"] = r.grad_norm ? py::cast(*r.grad_norm) : py::none();
  d["align_cos"] = r.align_cos ? py::cast(*r.align_cos) : py::none();
  d["mc_alignment"] = r.mc_alignment ? py::cast(*r.mc_alignment) : py::none();
  d["mu_norm"] = r.mu_norm;
  d["skipped"] = r.skipped;
  d["seed"] = r.seed;
  return d;
}

py::list trace_to_list(const Trace& trace) {
  py::list out;
  for (const auto& r : trace) out.append(record_to_dict(r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Zeroth-order optimization with a learnable Gaussian "
            "direction-sampling policy";

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def_static("stream", &Rng::stream, py::arg("seed"), py::arg("stream_id"))
      .def("uniform", &Rng::uniform)
      .def("normal", &Rng::normal)
      .def("normal_vector", &Rng::normal_vector, py::arg("dim"));

  py::class_<ObjectiveOracle>(m, "ObjectiveOracle")
      .def(py::init(&make_objective), py::arg("dim"), py::arg("value"),
           py::arg("grad") = py::none(), py::arg("smoothness") = py::none())
      .def_readonly("dim", &ObjectiveOracle::dim)
      .def_property_readonly("smoothness",
                             [](const ObjectiveOracle& o) -> py::object {
                               return o.smoothness ? py::cast(*o.smoothness)
                                                   : py::none();
                             })
      .def("has_grad", &ObjectiveOracle::has_grad)
      .def("value", [](const ObjectiveOracle& o, const Vector& x) {
        return o.value(x);
      })
      .def("grad", [](const ObjectiveOracle& o, const Vector& x) {
        if (!o.has_grad()) throw std::runtime_error("oracle has no gradient");
        return o.grad(x);
      });

  m.def("quadratic_objective", &quadratic_objective, py::arg("diag"),
        py::arg("shift"));

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("n_features", &Dataset::n_features)
      .def("__len__", [](const Dataset& d) { return d.rows.size(); })
      .def("dense", [](const Dataset& d) {
        Eigen::MatrixXd x = Eigen::MatrixXd::Zero(
            static_cast<Eigen::Index>(d.rows.size()), d.n_features);
        Vector y(static_cast<Eigen::Index>(d.rows.size()));
        for (std::size_t r = 0; r < d.rows.size(); ++r) {
          y[static_cast<Eigen::Index>(r)] = d.rows[r].label;
          for (const auto& [idx, val] : d.rows[r].features) {
            x(static_cast<Eigen::Index>(r), idx - 1) = val;
          }
        }
        return py::make_tuple(x, y);
      });

  m.def("parse_libsvm",
        py::overload_cast<const std::string&>(&parse_libsvm), py::arg("text"));
  m.def("load_libsvm", &load_libsvm, py::arg("path"));
  m.def("to_libsvm", &to_libsvm, py::arg("data"));
  m.def("with_intercept", &with_intercept, py::arg("data"));
  m.def("least_squares_objective", &least_squares_objective, py::arg("data"));
  m.def("logistic_objective", &logistic_objective, py::arg("data"));

  py::class_<SamplingPolicy>(m, "SamplingPolicy")
      .def(py::init([](const Vector& mu, double epsilon) {
             return SamplingPolicy{mu, epsilon};
           }),
           py::arg("mu"), py::arg("epsilon"))
      .def_readwrite("mu", &SamplingPolicy::mu)
      .def_readwrite("epsilon", &SamplingPolicy::epsilon);

  m.def("sample_directions", &sample_directions, py::arg("policy"),
        py::arg("k"), py::arg("rng"));
  m.def("normalize", &normalize, py::arg("v"));
  m.def("alignment", &alignment, py::arg("v"), py::arg("g"));
  m.def("log_density_grad", &log_density_grad, py::arg("policy"), py::arg("v"));
  m.def("random_unit", &random_unit, py::arg("dim"), py::arg("rng"));
  m.def("unit_with_cos", &unit_with_cos, py::arg("g"), py::arg("cos_beta"),
        py::arg("rng"));

  py::class_<ProbeSet>(m, "ProbeSet")
      .def(py::init<>())
      .def_readwrite("directions", &ProbeSet::directions)
      .def_readwrite("forward_values", &ProbeSet::forward_values)
      .def_readwrite("tau", &ProbeSet::tau);

  py::enum_<BaselineKind>(m, "BaselineKind")
      .value("MEAN", BaselineKind::kMean)
      .value("LEAVE_ONE_OUT", BaselineKind::kLeaveOneOut);

  py::class_<MuGradEstimate>(m, "MuGradEstimate")
      .def_readonly("g_mu", &MuGradEstimate::g_mu)
      .def_readonly("baseline_kind", &MuGradEstimate::baseline_kind)
      .def_readonly("advantages", &MuGradEstimate::advantages);

  m.def("two_point", &two_point, py::arg("oracle"), py::arg("x"), py::arg("v"),
        py::arg("tau"));
  m.def("dgd_estimate", &dgd_estimate, py::arg("grad"), py::arg("directions"));
  m.def("reinforce_mu_grad_mean", &reinforce_mu_grad_mean, py::arg("policy"),
        py::arg("directions"), py::arg("rewards"));
  m.def("reinforce_mu_grad_loo", &reinforce_mu_grad_loo, py::arg("policy"),
        py::arg("probes"), py::arg("reward_sign"));

  py::class_<BestDirection>(m, "BestDirection")
      .def_readonly("index", &BestDirection::index)
      .def_readonly("probes", &BestDirection::probes);

  m.def("select_best_direction", &select_best_direction, py::arg("oracle"),
        py::arg("x"), py::arg("directions"), py::arg("tau"));
  m.def("zo_gradient", &zo_gradient, py::arg("oracle"), py::arg("x"),
        py::arg("v_star"), py::arg("tau"),
        py::arg("cached_forward") = std::nullopt);

  py::class_<AlignmentEstimate>(m, "AlignmentEstimate")
      .def_readonly("mean", &AlignmentEstimate::mean)
      .def_readonly("stderr", &AlignmentEstimate::stderr_)
      .def_readonly("n", &AlignmentEstimate::n);

  m.def("mc_expected_alignment", &mc_expected_alignment, py::arg("policy"),
        py::arg("g"), py::arg("n"), py::arg("rng"));
  m.def("fd_grad_expected_alignment",
        [](const SamplingPolicy& policy, const Vector& g, std::int64_t n,
           double h, std::uint64_t seed) {
          const auto est = fd_grad_expected_alignment(policy, g, n, h, seed);
          return py::make_tuple(est.grad, est.stderr_);
        },
        py::arg("policy"), py::arg("g"), py::arg("n"), py::arg("h"),
        py::arg("seed"));

  m.def("landscape_grid",
        [](const Vector& g, double epsilon, double lo, double hi,
           int resolution, std::int64_t n_per_cell, std::uint64_t seed) {
          const auto grid =
              landscape_grid(g, epsilon, lo, hi, resolution, n_per_cell, seed);
          py::list out;
          for (const auto& cell : grid) {
            py::dict d;
            d["mu1"] = cell.mu1;
            d["mu2"] = cell.mu2;
            d["mean"] = cell.estimate.mean;
            d["stderr"] = cell.estimate.stderr_;
            out.append(d);
          }
          return out;
        },
        py::arg("g"), py::arg("epsilon"), py::arg("lo"), py::arg("hi"),
        py::arg("resolution"), py::arg("n_per_cell"), py::arg("seed"));

  m.def("psi_alignment", &psi_alignment, py::arg("a"), py::arg("u"));

  py::class_<PsiProbe>(m, "PsiProbe")
      .def_readonly("hessian_norm", &PsiProbe::hessian_norm)
      .def_readonly("bound", &PsiProbe::bound);

  m.def("numeric_hessian_psi", &numeric_hessian_psi, py::arg("a"), py::arg("u"),
        py::arg("h") = 0.0);
  m.def("dynamics_floor", &dynamics_floor, py::arg("delta"), py::arg("dim"),
        py::arg("l_gamma_x") = 0.0);

  py::class_<DynamicsConfig> dynamics_config(m, "DynamicsConfig");
  py::enum_<DynamicsConfig::MuGradMode>(dynamics_config, "MuGradMode")
      .value("FD_PAIRED_SEEDS", DynamicsConfig::MuGradMode::kFdPairedSeeds)
      .value("REINFORCE", DynamicsConfig::MuGradMode::kReinforce);
  dynamics_config.def(py::init<>())
      .def_readwrite("horizon", &DynamicsConfig::horizon)
      .def_readwrite("n_per_estimate", &DynamicsConfig::n_per_estimate)
      .def_readwrite("delta", &DynamicsConfig::delta)
      .def_readwrite("theoretical_schedule", &DynamicsConfig::theoretical_schedule)
      .def_readwrite("gamma_mu_const", &DynamicsConfig::gamma_mu_const)
      .def_readwrite("epsilon_const", &DynamicsConfig::epsilon_const)
      .def_readwrite("epsilon_at_origin", &DynamicsConfig::epsilon_at_origin)
      .def_readwrite("mu_grad_mode", &DynamicsConfig::mu_grad_mode)
      .def_readwrite("n_grad", &DynamicsConfig::n_grad)
      .def_readwrite("reinforce_k", &DynamicsConfig::reinforce_k)
      .def_readwrite("fd_step_rel", &DynamicsConfig::fd_step_rel)
      .def_readwrite("seed", &DynamicsConfig::seed);

  py::class_<DynamicsReport>(m, "DynamicsReport")
      .def_readonly("monotone_fraction", &DynamicsReport::monotone_fraction)
      .def_readonly("floor_value", &DynamicsReport::floor_value)
      .def_readonly("mu_norm_floor_ok", &DynamicsReport::mu_norm_floor_ok)
      .def_property_readonly("series", [](const DynamicsReport& r) {
        py::list out;
        for (const auto& p : r.series) {
          py::dict d;
          d["t"] = p.t;
          d["mean"] = p.estimate.mean;
          d["stderr"] = p.estimate.stderr_;
          d["cos_beta"] = p.cos_beta;
          d["mu_norm"] = p.mu_norm;
          out.append(d);
        }
        return out;
      });

  m.def("dynamics_check", &dynamics_check, py::arg("g"), py::arg("mu0"),
        py::arg("config"));

  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("run_from_config",
        [](const std::string& text) {
          const RunConfig cfg = parse_config(text);
          const auto oracle = build_objective(cfg);
          const auto spec = to_run_spec(cfg);
          return trace_to_list(run(spec, oracle, run_id_for(cfg, cfg.seed)));
        },
        py::arg("config_text"),
        "Parse a key=value config, build its objective, run it, and return "
        "the trace as a list of dicts.");
  m.def("run_with_oracle",
        [](const std::string& text, const ObjectiveOracle& oracle) {
          const RunConfig cfg = parse_config(text);
          const auto spec = to_run_spec(cfg);
          return trace_to_list(run(spec, oracle, run_id_for(cfg, cfg.seed)));
        },
        py::arg("config_text"), py::arg("oracle"),
        "Run a config against a caller-supplied oracle (e.g. one wrapping a "
        "python callable). The config's objective section is ignored apart "
        "from validation.");
}
