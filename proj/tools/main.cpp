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

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zoldsd/bench.hpp"

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::istringstream in(csv);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    seeds.push_back(std::stoull(tok));
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeroth-order optimization with a learnable direction-sampling "
               "policy: run experiments, budget-matched comparisons, and "
               "numerical verification suites."};
  app.require_subcommand(1);
  app.fallthrough(true);

  std::string out_flag;
  app.add_option("--out", out_flag,
                 "Output directory (the ZOLDSD_OUT environment variable "
                 "overrides this)");

  // run
  auto* run_cmd = app.add_subcommand("run", "Execute one config, write its trace CSV");
  std::string run_config_path;
  run_cmd->add_option("--config", run_config_path, "Config file (key=value lines)")
      ->required();

  // compare
  auto* compare_cmd = app.add_subcommand(
      "compare", "Budget-matched comparison across configs and seeds");
  std::vector<std::string> compare_configs;
  std::string seeds_csv = "1,2,3,4,5";
  compare_cmd->add_option("--config", compare_configs, "Config file (repeatable)")
      ->required()
      ->expected(-2);
  compare_cmd->add_option("--seeds", seeds_csv, "Comma-separated seed list");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Run a named property suite");
  std::string suite;
  verify_cmd
      ->add_option("--suite", suite,
                   "alignment_1_over_d | hessian_bound | landscape | dynamics "
                   "| unbiasedness")
      ->required();

  // landscape
  auto* landscape_cmd = app.add_subcommand(
      "landscape", "Emit the 2-d expected-alignment grid as CSV");
  double epsilon = 0.5;
  double range = 2.0;
  int resolution = 41;
  std::int64_t n_per_cell = 20000;
  std::uint64_t seed = 1;
  landscape_cmd->add_option("--epsilon", epsilon, "Sampling standard deviation");
  landscape_cmd->add_option("--range", range, "Grid spans [-range, range]^2");
  landscape_cmd->add_option("--resolution", resolution, "Grid points per axis");
  landscape_cmd->add_option("--n", n_per_cell, "Samples per grid cell");
  landscape_cmd->add_option("--seed", seed, "Base seed");

  CLI11_PARSE(app, argc, argv);
  const std::string out_dir = zoldsd::resolve_out_dir(out_flag);

  try {
    if (run_cmd->parsed()) {
      return zoldsd::cmd_run(zoldsd::load_config(run_config_path), out_dir,
                             std::cout);
    }
    if (compare_cmd->parsed()) {
      return zoldsd::cmd_compare(compare_configs, parse_seeds(seeds_csv),
                                 out_dir, std::cout);
    }
    if (verify_cmd->parsed()) {
      return zoldsd::cmd_verify(suite, out_dir, std::cout);
    }
    if (landscape_cmd->parsed()) {
      return zoldsd::cmd_landscape(epsilon, -range, range, resolution,
                                   n_per_cell, seed, out_dir, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
