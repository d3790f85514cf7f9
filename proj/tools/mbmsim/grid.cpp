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

#include "grid.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string_view>

namespace mbm::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parseNumber(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) throw std::invalid_argument("not a finite number");
  return value;
}

void appendRange(std::string_view item, double defaultStep, std::vector<double>& out) {
  const auto dots = item.find("..");
  if (dots == std::string_view::npos) {
    out.push_back(parseNumber(item));
    return;
  }
  const double lo = parseNumber(item.substr(0, dots));
  std::string_view tail = item.substr(dots + 2);
  double step = defaultStep;
  if (const auto colon = tail.find(':'); colon != std::string_view::npos) {
    step = parseNumber(tail.substr(colon + 1));
    tail = tail.substr(0, colon);
  }
  const double hi = parseNumber(tail);
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("range ends must be finite");
  if (!(step > 0.0)) throw std::invalid_argument("range step must be positive");
  if (hi < lo) throw std::invalid_argument("range end is below its start");
  const double span = (hi - lo) / step;
  const auto count = static_cast<long long>(std::floor(span + 1e-9)) + 1;
  if (count > 1'000'000) throw std::invalid_argument("range has too many points");
  for (long long i = 0; i < count; ++i) {
    const double v = lo + static_cast<double>(i) * step;
    out.push_back(std::abs(v - hi) <= 1e-9 * step ? hi : v);
  }
}

}  // namespace

std::vector<double> parseGrid(const std::string& text, double defaultStep) {
  const std::string_view all = trim(text);
  if (all.empty()) throw std::invalid_argument("empty grid");
  std::vector<double> out;
  std::string_view rest = all;
  while (true) {
    const auto comma = rest.find(',');
    appendRange(trim(rest.substr(0, comma)), defaultStep, out);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<long long> parseIntGrid(const std::string& text) {
  std::vector<long long> out;
  for (double v : parseGrid(text, 1.0)) {
    if (!std::isfinite(v) || v != std::round(v)) {
      throw std::invalid_argument("expected integers in '" + text + "'");
    }
    out.push_back(static_cast<long long>(v));
  }
  return out;
}

std::string formatExact(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, end);
}

}  // namespace mbm::cli
