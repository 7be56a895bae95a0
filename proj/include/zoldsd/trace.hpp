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
#include <vector>

namespace zoldsd {

/// One row of run telemetry. Optional fields serialize as empty strings.
struct TraceRecord {
  std::string run_id;
  long t = 0;
  long oracle_calls = 0;
  double loss = 0.0;
  std::optional<double> grad_norm;
  std::optional<double> align_cos;     // cos(g_x, grad f)
  std::optional<double> mc_alignment;  // mean alignment of the sampled batch
  double mu_norm = 0.0;
  bool skipped = false;
  std::uint64_t seed = 0;
};

using Trace = std::vector<TraceRecord>;

inline constexpr const char* kTraceCsvHeader =
    "run_id,t,oracle_calls,loss,grad_norm,align_cos,mc_alignment,mu_norm,"
    "skipped,seed";

/// Shortest round-trip decimal form of a double ("" for nullopt overload).
std::string format_double(double v);
std::string format_optional(const std::optional<double>& v);

std::string trace_to_csv(const Trace& trace);
void write_trace_csv(const Trace& trace, const std::string& path);

}  // namespace zoldsd
