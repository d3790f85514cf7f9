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

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mbm::cli {

/// A configuration problem; the message starts with "origin: ".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key = value text. Lines starting with '#' or ';' are comments;
/// "[name]" opens a section. Keys before the first header are top-level.
/// Values run to the end of the line, trimmed.
class ConfigFile {
 public:
  struct Entry {
    std::string value;
    std::string origin;  ///< "source:line"
  };
  using Section = std::map<std::string, Entry>;

  static ConfigFile parse(std::string_view text, const std::string& sourceName);
  static ConfigFile load(const std::filesystem::path& path);

  const std::map<std::string, Section>& sections() const { return sections_; }
  /// Origin of each section header, for error messages.
  const std::map<std::string, std::string>& sectionOrigins() const { return sectionOrigins_; }

 private:
  std::map<std::string, Section> sections_;
  std::map<std::string, std::string> sectionOrigins_;
};

/// Resolved settings for one subcommand. Later merges override earlier ones,
/// so apply preset, then config file, then command-line flags.
class Settings {
 public:
  /// `allowed` are this command's keys; `known` is the union over all
  /// commands, accepted at top level so one file can serve several commands.
  Settings(std::string command, std::set<std::string> allowed, std::set<std::string> known,
           std::set<std::string> commands);

  void merge(const ConfigFile& file);
  void set(const std::string& key, const std::string& value, const std::string& origin);
  bool has(const std::string& key) const;

  std::string getString(const std::string& key, const std::string& fallback);
  long long getInt(const std::string& key, long long fallback, long long min, long long max);
  double getDouble(const std::string& key, double fallback);
  bool getBool(const std::string& key, bool fallback);
  /// Grid syntax from grid.hpp.
  std::vector<double> getGrid(const std::string& key, const std::string& fallback,
                              double defaultStep);
  std::vector<long long> getIntGrid(const std::string& key, const std::string& fallback);

  /// Keys read so far with their effective values, in first-read order.
  const std::vector<std::pair<std::string, std::string>>& resolved() const { return resolved_; }
  /// resolved() as a config file that reproduces this run.
  std::string resolvedIni() const;

  const std::string& command() const { return command_; }

  /// Throws a ConfigError citing where `key` was set.
  [[noreturn]] void reject(const std::string& key, const std::string& message) const;

 private:
  const ConfigFile::Entry* lookup(const std::string& key) const;
  void record(const std::string& key, const std::string& value);

  std::string command_;
  std::set<std::string> allowed_;
  std::set<std::string> known_;
  std::set<std::string> commands_;
  std::map<std::string, ConfigFile::Entry> values_;
  std::vector<std::pair<std::string, std::string>> resolved_;
};

}  // namespace mbm::cli
