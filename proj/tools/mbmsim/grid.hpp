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

#include <string>
#include <vector>

namespace mbm::cli {

/// Parses a comma-separated list whose items are numbers, "a..b" or
/// "a..b:step" (inclusive), e.g. "0..30:5,inf". "inf" denotes +infinity.
/// Throws std::invalid_argument.
std::vector<double> parseGrid(const std::string& text, double defaultStep);

/// parseGrid with step 1, requiring integer values.
std::vector<long long> parseIntGrid(const std::string& text);

/// Shortest text that parses back to the same double ("inf" for infinity).
std::string formatExact(double value);

}  // namespace mbm::cli
