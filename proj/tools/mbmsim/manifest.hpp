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
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"

namespace mbm::cli {

std::string toolVersion();
std::string gitDescribe();

/// Everything needed to rerun a command bit-exactly, plus a results summary.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string preset;
  std::string configFile;
  std::uint64_t seed = 0;
  std::string csvFile;
  std::string configCopy;  ///< resolved settings written as a config file
  double elapsedSeconds = 0.0;
  nlohmann::json results = nlohmann::json::object();
};

nlohmann::json toJson(const RunManifest& manifest, const Settings& settings);
void writeManifest(const std::filesystem::path& path, const RunManifest& manifest,
                   const Settings& settings);

}  // namespace mbm::cli
