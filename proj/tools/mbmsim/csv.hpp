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

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mbm/engine.hpp"

namespace mbm::cli {

/// Bumped whenever a column is added, removed or reinterpreted.
inline constexpr int kCsvSchemaVersion = 1;

/// Columns of the SER/FER curve files.
inline constexpr const char* kCurveHeader =
    "ebn0_db,trials,sym_errors,frame_errors,ser,fer,ci95_lo,ci95_hi,seconds";

/// 10 significant digits; "inf" for +infinity.
std::string formatValue(double value);

/// Minimal CSV writer; fields never need quoting in this tool.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
  std::size_t width_;
};

void writeCurveCsv(std::ostream& out, std::span<const CurvePoint> points);

/// Parses a file written by writeCurveCsv. Fields not stored in the CSV
/// (frames, decoded symbol errors, throughput, censored) are left default.
/// Throws std::runtime_error on a malformed file.
std::vector<CurvePoint> readCurveCsv(std::istream& in);

}  // namespace mbm::cli
