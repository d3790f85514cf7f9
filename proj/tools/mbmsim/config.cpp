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

#include "config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "grid.hpp"

namespace mbm::cli {
namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

bool validName(std::string_view s, bool allowDash) {
  if (s.empty()) return false;
  for (char ch : s) {
    const bool ok = std::islower(static_cast<unsigned char>(ch)) ||
                    std::isdigit(static_cast<unsigned char>(ch)) || ch == '_' ||
                    (allowDash && ch == '-');
    if (!ok) return false;
  }
  return true;
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text, const std::string& sourceName) {
  ConfigFile file;
  file.sections_[""];
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineNo = 0;
  while (std::getline(in, raw)) {
    ++lineNo;
    const std::string origin = sourceName + ":" + std::to_string(lineNo);
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(origin + ": unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!validName(section, true)) throw ConfigError(origin + ": bad section name '" + section + "'");
      file.sections_[section];
      file.sectionOrigins_.emplace(section, origin);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ": expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!validName(key, false)) throw ConfigError(origin + ": bad key '" + key + "'");
    auto& target = file.sections_[section];
    if (target.count(key)) throw ConfigError(origin + ": duplicate key '" + key + "'");
    target.emplace(key, Entry{value, origin});
  }
  return file;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream body;
  body << in.rdbuf();
  return parse(body.str(), path.string());
}

Settings::Settings(std::string command, std::set<std::string> allowed, std::set<std::string> known,
                   std::set<std::string> commands)
    : command_(std::move(command)),
      allowed_(std::move(allowed)),
      known_(std::move(known)),
      commands_(std::move(commands)) {}

void Settings::merge(const ConfigFile& file) {
  for (const auto& [name, origin] : file.sectionOrigins()) {
    if (!commands_.count(name)) throw ConfigError(origin + ": unknown section [" + name + "]");
  }
  for (const auto& [key, entry] : file.sections().at("")) {
    if (!known_.count(key)) throw ConfigError(entry.origin + ": unknown key '" + key + "'");
    if (allowed_.count(key)) values_[key] = entry;
  }
  const auto own = file.sections().find(command_);
  if (own == file.sections().end()) return;
  for (const auto& [key, entry] : own->second) {
    if (!allowed_.count(key)) {
      throw ConfigError(entry.origin + ": key '" + key + "' is not used by '" + command_ + "'");
    }
    values_[key] = entry;
  }
}

void Settings::set(const std::string& key, const std::string& value, const std::string& origin) {
  if (!allowed_.count(key)) throw ConfigError(origin + ": key '" + key + "' is not used by '" + command_ + "'");
  values_[key] = ConfigFile::Entry{value, origin};
}

bool Settings::has(const std::string& key) const { return values_.count(key) > 0; }

const ConfigFile::Entry* Settings::lookup(const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

void Settings::record(const std::string& key, const std::string& value) {
  for (auto& [k, v] : resolved_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  resolved_.emplace_back(key, value);
}

void Settings::reject(const std::string& key, const std::string& message) const {
  const auto* entry = lookup(key);
  const std::string origin = entry ? entry->origin : "default";
  throw ConfigError(origin + ": " + key + ": " + message);
}

std::string Settings::getString(const std::string& key, const std::string& fallback) {
  const auto* entry = lookup(key);
  std::string value = entry ? entry->value : fallback;
  record(key, value);
  return value;
}

long long Settings::getInt(const std::string& key, long long fallback, long long min,
                           long long max) {
  const auto* entry = lookup(key);
  long long value = fallback;
  if (entry) {
    const std::string& s = entry->value;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) {
      reject(key, "expected an integer, got '" + s + "'");
    }
  }
  if (value < min || value > max) {
    reject(key, "value " + std::to_string(value) + " outside [" + std::to_string(min) + ", " +
                  std::to_string(max) + "]");
  }
  record(key, std::to_string(value));
  return value;
}

double Settings::getDouble(const std::string& key, double fallback) {
  const auto* entry = lookup(key);
  double value = fallback;
  if (entry) {
    try {
      const auto grid = parseGrid(entry->value, 1.0);
      if (grid.size() != 1) reject(key, "expected a single number");
      value = grid.front();
    } catch (const std::invalid_argument& e) {
      reject(key, e.what());
    }
  }
  record(key, formatExact(value));
  return value;
}

bool Settings::getBool(const std::string& key, bool fallback) {
  const auto* entry = lookup(key);
  bool value = fallback;
  if (entry) {
    const std::string& s = entry->value;
    if (s == "true" || s == "yes" || s == "on" || s == "1") {
      value = true;
    } else if (s == "false" || s == "no" || s == "off" || s == "0") {
      value = false;
    } else {
      reject(key, "expected true or false, got '" + s + "'");
    }
  }
  record(key, value ? "true" : "false");
  return value;
}

std::vector<double> Settings::getGrid(const std::string& key, const std::string& fallback,
                                      double defaultStep) {
  const auto* entry = lookup(key);
  const std::string text = entry ? entry->value : fallback;
  std::vector<double> grid;
  try {
    grid = parseGrid(text, defaultStep);
  } catch (const std::invalid_argument& e) {
    reject(key, e.what());
  }
  std::string canonical;
  for (double v : grid) canonical += (canonical.empty() ? "" : ",") + formatExact(v);
  record(key, canonical);
  return grid;
}

std::vector<long long> Settings::getIntGrid(const std::string& key, const std::string& fallback) {
  const auto* entry = lookup(key);
  const std::string text = entry ? entry->value : fallback;
  std::vector<long long> grid;
  try {
    grid = parseIntGrid(text);
  } catch (const std::invalid_argument& e) {
    reject(key, e.what());
  }
  std::string canonical;
  for (long long v : grid) canonical += (canonical.empty() ? "" : ",") + std::to_string(v);
  record(key, canonical);
  return grid;
}

std::string Settings::resolvedIni() const {
  std::ostringstream out;
  out << "[" << command_ << "]\n";
  for (const auto& [key, value] : resolved_) out << key << " = " << value << "\n";
  return out.str();
}

}  // namespace mbm::cli
