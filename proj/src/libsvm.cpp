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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "zoldsd/objective.hpp"
#include "zoldsd/trace.hpp"

namespace zoldsd {

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("libsvm line " + std::to_string(line_no) + ": " +
                           what);
}

double parse_number(const std::string& tok, std::size_t line_no,
                    const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    fail(line_no, std::string("non-numeric ") + what + " '" + tok + "'");
  }
  if (used != tok.size()) {
    fail(line_no, std::string("malformed ") + what + " '" + tok + "'");
  }
  if (!std::isfinite(v)) {
    fail(line_no, std::string("non-finite ") + what + " '" + tok + "'");
  }
  return v;
}

}  // namespace

Dataset parse_libsvm(std::istream& in) {
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;  // blank line

    Dataset::Row row;
    row.label = parse_number(tok, line_no, "label");

    int last_index = 0;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 ||
          colon + 1 == tok.size()) {
        fail(line_no, "malformed feature token '" + tok + "'");
      }
      std::size_t used = 0;
      long idx = 0;
      try {
        idx = std::stol(tok.substr(0, colon), &used);
      } catch (const std::exception&) {
        fail(line_no, "malformed feature index in '" + tok + "'");
      }
      if (used != colon || idx < 1) {
        fail(line_no, "feature indices must be positive integers: '" + tok + "'");
      }
      if (idx <= last_index) {
        fail(line_no, "non-increasing feature index " + std::to_string(idx));
      }
      last_index = static_cast<int>(idx);
      const double val =
          parse_number(tok.substr(colon + 1), line_no, "feature value");
      row.features.emplace_back(static_cast<int>(idx), val);
      if (last_index > data.n_features) data.n_features = last_index;
    }
    data.rows.push_back(std::move(row));
  }
  if (data.rows.empty()) {
    throw std::runtime_error("libsvm: empty dataset");
  }
  return data;
}

Dataset parse_libsvm(const std::string& text) {
  std::istringstream in(text);
  return parse_libsvm(in);
}

Dataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("libsvm: cannot open '" + path + "'");
  }
  return parse_libsvm(in);
}

std::string to_libsvm(const Dataset& data) {
  std::string out;
  for (const auto& row : data.rows) {
    out += format_double(row.label);
    for (const auto& [idx, val] : row.features) {
      out += ' ';
      out += std::to_string(idx);
      out += ':';
      out += format_double(val);
    }
    out += '\n';
  }
  return out;
}

Dataset with_intercept(Dataset data) {
  const int intercept_index = data.n_features + 1;
  for (auto& row : data.rows) {
    row.features.emplace_back(intercept_index, 1.0);
  }
  data.n_features = intercept_index;
  return data;
}

}  // namespace zoldsd
