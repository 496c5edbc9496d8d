// Copyright 2026 The eucaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

// curve.csv: one row per evaluation point, written append-only.

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "eucaug/errors.hpp"
#include "eucaug/trainer.hpp"

namespace eucaug {

inline constexpr const char* kCurveHeader = "step,mean_return,std_return,wall_seconds";

// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_curve_row(const CurveRecord& r) {
  return std::to_string(r.step) + "," + format_number(r.mean_return) + "," + format_number(r.std_return) + "," +
         format_number(r.wall_seconds);
}

inline double parse_number(const std::string& field, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw ParseError(where + ": '" + field + "' is not a number");
  }
  return v;
}

inline std::vector<CurveRecord> read_curve(std::istream& in, const std::string& name = "curve.csv") {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(name + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCurveHeader) throw ParseError(name + ": header must be '" + std::string(kCurveHeader) + "'");
  std::vector<CurveRecord> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    const std::string where = name + ":" + std::to_string(row);
    if (fields.size() != 4) throw ParseError(where + ": expected 4 columns");
    CurveRecord r;
    const double step = parse_number(fields[0], where);
    if (step < 0 || step != static_cast<double>(static_cast<std::uint64_t>(step))) {
      throw ParseError(where + ": step must be a non-negative integer");
    }
    r.step = static_cast<std::uint64_t>(step);
    r.mean_return = parse_number(fields[1], where);
    r.std_return = parse_number(fields[2], where);
    r.wall_seconds = parse_number(fields[3], where);
    out.push_back(r);
  }
  return out;
}

inline std::vector<CurveRecord> read_curve_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_curve(in, path);
}

}  // namespace eucaug
