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

#include "zoldsd/trace.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace zoldsd {

std::string format_double(double v) {
  char buf[40];
  // %.17g round-trips every double; keep shorter forms when exact.
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  if (std::strtod(buf, nullptr) != v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
  }
  return buf;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string trace_to_csv(const Trace& trace) {
  std::string out(kTraceCsvHeader);
  out += '\n';
  for (const TraceRecord& r : trace) {
    out += r.run_id;
    out += ',';
    out += std::to_string(r.t);
    out += ',';
    out += std::to_string(r.oracle_calls);
    out += ',';
    out += format_double(r.loss);
    out += ',';
    out += format_optional(r.grad_norm);
    out += ',';
    out += format_optional(r.align_cos);
    out += ',';
    out += format_optional(r.mc_alignment);
    out += ',';
    out += format_double(r.mu_norm);
    out += ',';
    out += r.skipped ? '1' : '0';
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

void write_trace_csv(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open trace output '" + path + "'");
  }
  out << trace_to_csv(trace);
  if (!out) {
    throw std::runtime_error("failed writing trace output '" + path + "'");
  }
}

}  // namespace zoldsd
