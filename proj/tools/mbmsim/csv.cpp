// Copyright 2026 The mbmsim Authors
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

#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mbm::cli {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double toDouble(const std::string& s, int lineNo) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) {
    throw std::runtime_error("csv line " + std::to_string(lineNo) + ": bad number '" + s + "'");
  }
  return v;
}

std::uint64_t toCount(const std::string& s, int lineNo) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) {
    throw std::runtime_error("csv line " + std::to_string(lineNo) + ": bad count '" + s + "'");
  }
  return v;
}

}  // namespace

std::string formatValue(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), width_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw std::logic_error("csv row width mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << fields[i];
  out_ << '\n';
}

void writeCurveCsv(std::ostream& out, std::span<const CurvePoint> points) {
  out << kCurveHeader << '\n';
  for (const auto& p : points) {
    out << formatValue(p.ebN0Db) << ',' << p.trials << ',' << p.symbolErrors << ','
        << p.frameErrors << ',' << formatValue(p.ser) << ',' << formatValue(p.fer) << ','
        << formatValue(p.ciLow) << ',' << formatValue(p.ciHigh) << ',' << formatValue(p.seconds)
        << '\n';
  }
}

std::vector<CurvePoint> readCurveCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCurveHeader) {
    throw std::runtime_error("csv: missing or unexpected header");
  }
  std::vector<CurvePoint> out;
  int lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 9) {
      throw std::runtime_error("csv line " + std::to_string(lineNo) + ": expected 9 fields");
    }
    CurvePoint p;
    p.ebN0Db = toDouble(f[0], lineNo);
    p.trials = toCount(f[1], lineNo);
    p.symbolErrors = toCount(f[2], lineNo);
    p.frameErrors = toCount(f[3], lineNo);
    p.ser = toDouble(f[4], lineNo);
    p.fer = toDouble(f[5], lineNo);
    p.ciLow = toDouble(f[6], lineNo);
    p.ciHigh = toDouble(f[7], lineNo);
    p.ci95 = 0.5 * (p.ciHigh - p.ciLow);
    p.seconds = toDouble(f[8], lineNo);
    out.push_back(p);
  }
  return out;
}

}  // namespace mbm::cli
