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
#include <iosfwd>
#include <string>
#include <vector>

#include "zoldsd/config.hpp"

namespace zoldsd {

/// Output directory resolution: the ZOLDSD_OUT environment variable
/// overrides the --out flag; "." when neither is set.
std::string resolve_out_dir(const std::string& flag_value);

/// Runs one config and writes <out_dir>/<run_id>.csv. Returns 0 on success.
int cmd_run(const RunConfig& config, const std::string& out_dir,
            std::ostream& log);

struct CompareRow {
  std::string method;
  long iterations = 0;
  long oracle_calls = 0;
  double final_loss_median = 0.0;
  double final_loss_iqr = 0.0;
  double final_grad_median = 0.0;  // NaN when the objective has no gradient
  double final_grad_iqr = 0.0;
};

/// Budget-matched comparison: every config must share the objective section
/// and declare the same oracle budget (refused otherwise). Each (config,
/// seed) run executes on its own worker with an isolated RNG stream and trace
/// file; the summary (median / IQR of final loss and final gradient norm over
/// seeds) lands in <out_dir>/compare_summary.csv.
int cmd_compare(const std::vector<std::string>& config_paths,
                const std::vector<std::uint64_t>& seeds,
                const std::string& out_dir, std::ostream& log,
                std::vector<CompareRow>* rows_out = nullptr);

/// Named property suites: alignment_1_over_d | hessian_bound | landscape |
/// dynamics | unbiasedness. Prints one margin line per check; returns 0 iff
/// all pass.
int cmd_verify(const std::string& suite, const std::string& out_dir,
               std::ostream& log);

/// Emits the 2-d expected-alignment grid ("mu1,mu2,mean,stderr") to
/// <out_dir>/landscape.csv.
int cmd_landscape(double epsilon, double lo, double hi, int resolution,
                  std::int64_t n_per_cell, std::uint64_t seed,
                  const std::string& out_dir, std::ostream& log);

}  // namespace zoldsd
