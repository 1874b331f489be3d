//
// Copyright 2026 The dp_linreg Authors
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
//

// Dataset CSV input and result-table output.

#pragma once

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dp_linreg/errors.hpp"
#include "dp_linreg/numerics.hpp"

namespace dp_linreg {

// --- dataset CSV ---------------------------------------------------------------

struct RawTable {
  std::vector<std::string> feature_names;
  std::string target_name;
  Mat x;
  Vec y;
};

namespace internal {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos
                                              ? std::string_view::npos
                                              : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

}  // namespace internal

// Header row, numeric columns. The target is the last column unless
// `target_col` names another one. `source` labels error messages.
inline RawTable parse_csv(std::istream& in, const std::string& source,
                          const std::optional<std::string>& target_col = std::nullopt) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const std::vector<std::string> header = internal::split(line, ',');
  if (header.size() < 2) {
    throw DataError(source + ": need at least one feature and one target column");
  }
  std::size_t target = header.size() - 1;
  if (target_col) {
    target = header.size();
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == *target_col) target = j;
    }
    if (target == header.size()) {
      throw DataError(source + ": no column named '" + *target_col + "'");
    }
  }
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (internal::trim(line).empty()) continue;
    const auto cells = internal::split(line, ',');
    if (cells.size() != header.size()) {
      throw DataError(source + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto v = internal::parse_double(cells[j]);
      if (!v) {
        throw DataError(source + ":" + std::to_string(line_no) +
                        ": non-numeric value in column '" + header[j] + "'");
      }
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(source + ": no data rows");
  RawTable t;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(header.size() - 1);
  t.x.resize(n, d);
  t.y.resize(n);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j == target) {
      t.target_name = header[j];
    } else {
      t.feature_names.push_back(header[j]);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j == target) {
        t.y(i) = r[j];
      } else {
        t.x(i, c++) = r[j];
      }
    }
  }
  return t;
}

inline RawTable read_csv(const std::string& path,
                         const std::optional<std::string>& target_col = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  return parse_csv(in, path, target_col);
}

// --- result tables -------------------------------------------------------------

struct ResultRow {
  std::string dataset;
  std::string estimator;
  double eps = 0.0;
  double delta = 0.0;
  std::string metric;
  double mean = 0.0;
  double std = 0.0;
  int trials = 0;
  int degenerate_count = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

// Nine significant digits.
inline std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline constexpr char kResultsHeader[] =
    "dataset,estimator,eps,delta,metric,mean,std,trials,degenerate_count";

namespace internal {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace internal

inline void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << internal::csv_field(r.dataset) << ',' << internal::csv_field(r.estimator)
        << ',' << format_g9(r.eps) << ',' << format_g9(r.delta) << ','
        << internal::csv_field(r.metric) << ',' << format_g9(r.mean) << ','
        << format_g9(r.std) << ',' << r.trials << ',' << r.degenerate_count << '\n';
  }
}

// One JSON object per line; numbers carry the same nine-digit rounding as the
// CSV so the two files agree.
inline void write_results_jsonl(std::ostream& out, const std::vector<ResultRow>& rows) {
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["dataset"] = r.dataset;
    j["estimator"] = r.estimator;
    j["eps"] = std::stod(format_g9(r.eps));
    j["delta"] = std::stod(format_g9(r.delta));
    j["metric"] = r.metric;
    j["mean"] = std::isfinite(r.mean) ? nlohmann::ordered_json(std::stod(format_g9(r.mean)))
                                      : nlohmann::ordered_json(nullptr);
    j["std"] = std::isfinite(r.std) ? nlohmann::ordered_json(std::stod(format_g9(r.std)))
                                    : nlohmann::ordered_json(nullptr);
    j["trials"] = r.trials;
    j["degenerate_count"] = r.degenerate_count;
    out << j.dump() << '\n';
  }
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError(path + ": cannot open for writing");
  f << content;
  if (!f) throw DataError(path + ": write failed");
}

}  // namespace dp_linreg
