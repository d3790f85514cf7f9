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

#include "manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "csv.hpp"

namespace mbm::cli {

std::string toolVersion() { return MBM_VERSION; }
std::string gitDescribe() { return MBM_GIT_DESCRIBE; }

nlohmann::json toJson(const RunManifest& m, const Settings& settings) {
  nlohmann::json config = nlohmann::json::object();
  for (const auto& [key, value] : settings.resolved()) config[key] = value;

  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));

  return nlohmann::json{
      {"tool", "mbmsim"},
      {"version", toolVersion()},
      {"git", gitDescribe()},
      {"command", m.command},
      {"argv", m.argv},
      {"preset", m.preset},
      {"config_file", m.configFile},
      {"seed", m.seed},
      {"config", config},
      {"config_ini", settings.resolvedIni()},
      {"config_copy", m.configCopy},
      {"csv", m.csvFile},
      {"csv_schema", kCsvSchemaVersion},
      {"finished_utc", stamp},
      {"elapsed_seconds", m.elapsedSeconds},
      {"results", m.results},
  };
}

void writeManifest(const std::filesystem::path& path, const RunManifest& m,
                   const Settings& settings) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << toJson(m, settings).dump(2) << '\n';
}

}  // namespace mbm::cli
