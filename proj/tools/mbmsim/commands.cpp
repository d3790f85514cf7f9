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

#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "config.hpp"
#include "csv.hpp"
#include "grid.hpp"
#include "manifest.hpp"
#include "mbm/analysis.hpp"
#include "mbm/engine.hpp"
#include "presets.hpp"

namespace mbm::cli {
namespace {

namespace fs = std::filesystem;

struct KeyDoc {
  std::string key;
  std::string help;
};

struct CommandDoc {
  std::string name;
  std::string summary;
  std::vector<KeyDoc> keys;
};

std::vector<KeyDoc> constellationKeys() {
  return {
      {"units", "transmit units N"},
      {"bits_per_unit", "bits per unit R_n"},
      {"receive_dims", "receive dimensions K"},
      {"time_slots", "silent-transmission slots; multiplies K"},
      {"energy", "per-unit energy E"},
      {"constellation_mode", "fixed-single | redraw-per-batch | redraw-per-use"},
      {"batch_size", "frames per work chunk and per constellation redraw"},
      {"seed", "master seed"},
      {"workers", "worker threads, 0 = all cores"},
  };
}

std::vector<KeyDoc> detectorKeys() {
  return {
      {"detector", "auto | exhaustive | layered"},
      {"iterations", "layered detector iterations T"},
      {"beam_width", "layered detector beam width P"},
      {"permutations", "number of unit orderings tried"},
      {"permutation_seed", "seed for orderings when N > 4"},
      {"exhaustive_cap", "largest M searched exhaustively"},
  };
}

std::vector<KeyDoc> stoppingKeys() {
  return {
      {"max_trials", "trials per point (frames for fer)"},
      {"min_errors", "stop a point after this many errors"},
      {"max_seconds", "wall-clock cap per point, 0 = none"},
  };
}

std::vector<KeyDoc> trainingKeys() {
  return {
      {"pilot_n0", "pilot noise N0 for trained CSI, or none"},
      {"training_reps", "pilot repetitions averaged per constituent"},
      {"training_scheme", "hadamard | bypass"},
  };
}

std::vector<KeyDoc> concat(std::initializer_list<std::vector<KeyDoc>> parts) {
  std::vector<KeyDoc> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

const std::vector<CommandDoc>& commandDocs() {
  static const std::vector<CommandDoc> docs = {
      {"ser", "uncoded symbol-error-rate sweep",
       concat({constellationKeys(), detectorKeys(), stoppingKeys(), trainingKeys(),
               {{"ebn0", "Eb/N0 grid in dB"}}})},
      {"fer", "Reed-Solomon coded frame-error-rate sweep",
       concat({constellationKeys(), detectorKeys(), stoppingKeys(), trainingKeys(),
               {{"ebn0", "Eb/N0 grid in dB"},
                {"fec_bits", "RS field bits w"},
                {"fec_length", "RS length L"},
                {"fec_dimension", "RS dimension D"}}})},
      {"agree", "layered vs exhaustive detector agreement",
       concat({constellationKeys(), detectorKeys(), {{"max_trials", "trials per point"}},
               {{"ebn0", "Eb/N0 grid in dB"}}})},
      {"train-sweep", "SER against pilot quality",
       concat({constellationKeys(), detectorKeys(), stoppingKeys(),
               {{"ebn0", "operating Eb/N0 in dB"},
                {"pilot_snr_db", "pilot SNR grid in dB (inf = perfect CSI)"},
                {"training_reps", "pilot repetitions averaged per constituent"},
                {"training_scheme", "hadamard | bypass"}}})},
      {"analytic", "closed-form and asymptotic error probabilities",
       {{"k", "receive dimensions K"},
        {"delta", "grid of independent error positions"},
        {"t", "grid of correction capabilities (coded form)"},
        {"snr_db", "SNR grid in dB"},
        {"dimension", "code dimension for the finite-sum coded form"}}},
      {"capacity", "mutual information of random constellations",
       {{"points", "constellation size M"},
        {"realizations", "random constellations drawn"},
        {"k", "dimensions per point"},
        {"snr_db", "SNR grid in dB"},
        {"samples", "Monte Carlo samples per realization"},
        {"reference_samples", "samples for the QAM reference"},
        {"seed", "master seed"},
        {"workers", "worker threads, 0 = all cores"}}},
  };
  return docs;
}

std::string flagFor(const std::string& key) {
  std::string flag = "--" + key;
  std::replace(flag.begin(), flag.end(), '_', '-');
  return flag;
}

struct Invocation {
  std::string command;
  std::string preset;
  std::string configPath;
  std::string outDir;
  std::string name;
  bool quiet = false;
  std::vector<std::string> argv;
};

struct Output {
  fs::path csv;
  fs::path manifest;
  fs::path config;
};

Output prepareOutput(const Invocation& inv) {
  fs::path dir = inv.outDir;
  if (dir.empty()) {
    const char* env = std::getenv("MBMSIM_OUTPUT_DIR");
    dir = (env && *env) ? fs::path(env) : fs::path(".");
  }
  fs::create_directories(dir);
  const std::string stem = !inv.name.empty()      ? inv.name
                           : !inv.preset.empty() ? inv.preset + "-" + inv.command
                                                 : inv.command;
  return {dir / (stem + ".csv"), dir / (stem + ".manifest.json"), dir / (stem + ".ini")};
}

std::ofstream openOut(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(const Invocation& inv, const Output& out, const Settings& settings,
            RunManifest manifest) {
  manifest.command = inv.command;
  manifest.argv = inv.argv;
  manifest.preset = inv.preset;
  manifest.configFile = inv.configPath;
  manifest.csvFile = out.csv.filename().string();
  manifest.configCopy = out.config.filename().string();
  openOut(out.config) << settings.resolvedIni();
  writeManifest(out.manifest, manifest, settings);
  if (!inv.quiet) std::cerr << "wrote " << out.csv.string() << "\n";
}

/// Converts a spec validation failure into a configuration error.
template <typename Fn>
void checked(Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

SweepSpec buildSweep(Settings& s, const std::string& gridDefault, bool readStopping) {
  SweepSpec spec;
  spec.numUnits = static_cast<int>(s.getInt("units", 1, 1, 64));
  spec.bitsPerUnit = static_cast<int>(s.getInt("bits_per_unit", 8, 1, 24));
  spec.receiveDims = static_cast<int>(s.getInt("receive_dims", 8, 1, 1 << 16));
  spec.timeSlots = static_cast<int>(s.getInt("time_slots", 1, 1, 1024));
  spec.perUnitEnergy = s.getDouble("energy", 1.0);

  const std::string modeText = s.getString("constellation_mode", "redraw-per-batch");
  const auto mode = parseConstellationMode(modeText);
  if (!mode) s.reject("constellation_mode", "unknown mode '" + modeText + "'");
  spec.mode = *mode;
  spec.batchSize = static_cast<std::uint64_t>(s.getInt("batch_size", 1000, 1, 1LL << 40));
  spec.seed = static_cast<std::uint64_t>(s.getInt("seed", 1, 0, INT64_MAX));
  spec.workers = static_cast<int>(s.getInt("workers", 0, 0, 4096));

  spec.exhaustiveCap = static_cast<std::uint64_t>(
      s.getInt("exhaustive_cap", static_cast<long long>(kDefaultExhaustiveCap), 1, 1LL << 40));
  const int iterations = static_cast<int>(s.getInt("iterations", 2, 1, 1000));
  const int beam = static_cast<int>(s.getInt("beam_width", 1, 1, 1 << 20));
  const int perms = static_cast<int>(s.getInt("permutations", 24, 1, 100000));
  const auto permSeed = static_cast<std::uint64_t>(s.getInt("permutation_seed", 0, 0, INT64_MAX));
  checked([&] {
    spec.layered = DetectorConfig::standard(spec.numUnits, iterations, beam, perms, permSeed);
  });
  const std::string detector = s.getString("detector", "auto");
  if (detector == "auto") {
    const bool small = spec.rate() < 63 && (std::uint64_t{1} << spec.rate()) <= spec.exhaustiveCap;
    spec.detector = small ? DetectorKind::Exhaustive : DetectorKind::Layered;
  } else if (const auto kind = parseDetectorKind(detector)) {
    spec.detector = *kind;
  } else {
    s.reject("detector", "unknown detector '" + detector + "'");
  }

  if (readStopping) {
    spec.stopping.maxTrials =
        static_cast<std::uint64_t>(s.getInt("max_trials", 1'000'000, 1, INT64_MAX));
    spec.stopping.minErrors = static_cast<std::uint64_t>(s.getInt("min_errors", 100, 1, INT64_MAX));
    spec.stopping.maxWallSecondsPerPoint = s.getDouble("max_seconds", 0.0);
  }
  if (!gridDefault.empty()) spec.ebN0Grid = s.getGrid("ebn0", gridDefault, 0.5);
  return spec;
}

std::optional<TrainingScheme> parseScheme(const std::string& text) {
  if (text == "hadamard") return TrainingScheme::HadamardDefaults;
  if (text == "bypass") return TrainingScheme::Bypass;
  return std::nullopt;
}

void readTraining(Settings& s, SweepSpec& spec) {
  const std::string pilot = s.getString("pilot_n0", "none");
  const int reps = static_cast<int>(s.getInt("training_reps", 1, 1, 1 << 20));
  const std::string schemeText = s.getString("training_scheme", "hadamard");
  const auto scheme = parseScheme(schemeText);
  if (!scheme) s.reject("training_scheme", "unknown scheme '" + schemeText + "'");
  if (pilot == "none") return;
  TrainingSpec t;
  t.pilotN0 = s.getDouble("pilot_n0", 0.0);
  t.reps = reps;
  t.scheme = *scheme;
  spec.training = t;
}

PointObserver progress(const Invocation& inv) {
  if (inv.quiet) return {};
  return [](const CurvePoint& p) {
    std::cerr << "  Eb/N0 " << formatValue(p.ebN0Db) << " dB: " << p.trials << " uses, "
              << p.symbolErrors << " symbol errors, " << p.frameErrors << " frame errors, ser "
              << formatValue(p.ser) << (p.censored ? " (censored)" : "") << ", "
              << formatValue(p.seconds) << " s\n";
  };
}

nlohmann::json curveJson(const std::vector<CurvePoint>& points) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : points) {
    rows.push_back({{"ebn0_db", formatExact(p.ebN0Db)},
                    {"trials", p.trials},
                    {"frames", p.frames},
                    {"sym_errors", p.symbolErrors},
                    {"frame_errors", p.frameErrors},
                    {"decoded_symbol_errors", p.decodedSymbolErrors},
                    {"ci95_half_width", p.ci95},
                    {"throughput_symbols_per_sec", p.throughputSymbolsPerSec},
                    {"censored", p.censored}});
  }
  return rows;
}

void validateSpec(const SweepSpec& spec) {
  checked([&] { spec.validate(); });
}

int runSer(Settings& s, const Invocation& inv) {
  SweepSpec spec = buildSweep(s, "0..10", true);
  readTraining(s, spec);
  validateSpec(spec);
  const Output out = prepareOutput(inv);
  const auto start = std::chrono::steady_clock::now();
  const auto points = runUncodedSweep(spec, progress(inv));
  {
    auto file = openOut(out.csv);
    writeCurveCsv(file, points);
  }
  RunManifest m;
  m.seed = spec.seed;
  m.elapsedSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m.results = {{"detector", toString(spec.detector)}, {"points", curveJson(points)}};
  finish(inv, out, s, std::move(m));
  return kExitOk;
}

int runFer(Settings& s, const Invocation& inv) {
  SweepSpec spec = buildSweep(s, "0..10", true);
  readTraining(s, spec);
  FecSpec fec;
  fec.fieldBits = static_cast<int>(s.getInt("fec_bits", 8, 2, 16));
  fec.length = static_cast<int>(s.getInt("fec_length", 128, 2, 65535));
  fec.dimension = static_cast<int>(s.getInt("fec_dimension", 120, 1, 65535));
  spec.fec = fec;
  validateSpec(spec);
  const Output out = prepareOutput(inv);
  const auto start = std::chrono::steady_clock::now();
  const auto points = runCodedSweep(spec, progress(inv));
  {
    auto file = openOut(out.csv);
    writeCurveCsv(file, points);
  }
  const RsCode code(fec.fieldBits, fec.length, fec.dimension);
  RunManifest m;
  m.seed = spec.seed;
  m.elapsedSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m.results = {{"detector", toString(spec.detector)},
               {"primitive_polynomial", code.field().primitivePoly()},
               {"t", code.correctable()},
               {"information_bits_per_use", spec.informationRate()},
               {"uses_per_frame", spec.usesPerFrame()},
               {"points", curveJson(points)}};
  finish(inv, out, s, std::move(m));
  return kExitOk;
}

int runAgree(Settings& s, const Invocation& inv) {
  SweepSpec spec = buildSweep(s, "0", false);
  spec.detector = DetectorKind::Layered;
  spec.stopping.maxTrials = static_cast<std::uint64_t>(s.getInt("max_trials", 10000, 1, INT64_MAX));
  validateSpec(spec);
  checked([&] {
    if (spec.rate() > 63 || (std::uint64_t{1} << spec.rate()) > spec.exhaustiveCap) {
      throw std::invalid_argument("agreement needs M within exhaustive_cap");
    }
  });
  const Output out = prepareOutput(inv);
  const auto start = std::chrono::steady_clock::now();
  const auto points = runAgreementSweep(spec);
  {
    auto file = openOut(out.csv);
    CsvWriter csv(file, {"ebn0_db", "trials", "agreements", "rate", "ci95_lo", "ci95_hi", "seconds"});
    for (const auto& p : points) {
      csv.row({formatValue(p.ebN0Db), std::to_string(p.trials), std::to_string(p.agreements),
               formatValue(p.rate), formatValue(p.ci.low), formatValue(p.ci.high),
               formatValue(p.seconds)});
      if (!inv.quiet) {
        std::cerr << "  Eb/N0 " << formatValue(p.ebN0Db) << " dB: agreement " << formatValue(p.rate)
                  << " over " << p.trials << " trials\n";
      }
    }
  }
  RunManifest m;
  m.seed = spec.seed;
  m.elapsedSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  finish(inv, out, s, std::move(m));
  return kExitOk;
}

int runTrainSweep(Settings& s, const Invocation& inv) {
  SweepSpec spec = buildSweep(s, "", true);
  spec.ebN0Grid = {s.getDouble("ebn0", 0.0)};
  const auto pilotGrid = s.getGrid("pilot_snr_db", "0..30:5,inf", 5.0);
  const int reps = static_cast<int>(s.getInt("training_reps", 1, 1, 1 << 20));
  const std::string schemeText = s.getString("training_scheme", "hadamard");
  const auto scheme = parseScheme(schemeText);
  if (!scheme) s.reject("training_scheme", "unknown scheme '" + schemeText + "'");
  validateSpec(spec);
  const Output out = prepareOutput(inv);
  const auto start = std::chrono::steady_clock::now();
  nlohmann::json rows = nlohmann::json::array();
  auto file = openOut(out.csv);
  CsvWriter csv(file, {"pilot_snr_db", "pilot_n0", "trials", "sym_errors", "ser", "ci95_lo",
                       "ci95_hi", "seconds"});
  for (double pilotSnr : pilotGrid) {
    SweepSpec run = spec;
    const double pilotN0 = std::isinf(pilotSnr) ? 0.0 : std::pow(10.0, -pilotSnr / 10.0);
    run.training = TrainingSpec{pilotN0, reps, *scheme};
    const CurvePoint p = runUncodedSweep(run).front();
    csv.row({formatValue(pilotSnr), formatValue(pilotN0), std::to_string(p.trials),
             std::to_string(p.symbolErrors), formatValue(p.ser), formatValue(p.ciLow),
             formatValue(p.ciHigh), formatValue(p.seconds)});
    if (!inv.quiet) {
      std::cerr << "  pilot SNR " << formatValue(pilotSnr) << " dB: ser " << formatValue(p.ser)
                << "\n";
    }
    rows.push_back({{"pilot_snr_db", formatExact(pilotSnr)}, {"censored", p.censored}});
  }
  RunManifest m;
  m.seed = spec.seed;
  m.elapsedSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m.results = {{"pilots_per_training",
                pilotCount(spec.numUnits, spec.bitsPerUnit, reps, *scheme)},
               {"points", rows}};
  finish(inv, out, s, std::move(m));
  return kExitOk;
}

int runAnalytic(Settings& s, const Invocation& inv) {
  const int k = static_cast<int>(s.getInt("k", 1, 1, 4096));
  const auto snrGrid = s.getGrid("snr_db", "-10..20", 1.0);
  const bool coded = s.has("t");
  if (coded && s.has("delta")) s.reject("t", "give either delta or t, not both");
  const auto values = coded ? s.getIntGrid("t", "0") : s.getIntGrid("delta", "1");
  const long long dimension = s.has("dimension") ? s.getInt("dimension", 0, 1, 1 << 20) : 0;
  for (long long v : values) {
    if (v < (coded ? 0 : 1)) s.reject(coded ? "t" : "delta", coded ? "must be >= 0" : "must be >= 1");
    if (dimension > 0 && dimension <= v) s.reject("dimension", "must exceed every t");
  }
  for (double snrDb : snrGrid) {
    if (!std::isfinite(snrDb)) s.reject("snr_db", "values must be finite");
  }
  const Output out = prepareOutput(inv);
  auto file = openOut(out.csv);
  CsvWriter csv(file, {"snr_db", "delta_or_t", "p_closed", "p_asymptotic"});
  for (long long v : values) {
    for (double snrDb : snrGrid) {
      ErrorModelParams p;
      p.snr = std::pow(10.0, snrDb / 10.0);
      p.dims = k;
      p.delta = static_cast<int>(coded ? v + 1 : v);
      p.t = static_cast<int>(coded ? v : 0);
      const double closed = coded && dimension > 0
                                ? codedErrorFiniteSum(p, static_cast<int>(dimension))
                                : pairwiseErrorClosedForm(p);
      const double asym = coded ? codedErrorApprox(p) : pairwiseErrorAsymptotic(p);
      csv.row({formatValue(snrDb), std::to_string(v), formatValue(closed), formatValue(asym)});
    }
  }
  RunManifest m;
  m.results = {{"mode", coded ? "coded" : "pairwise"}};
  finish(inv, out, s, std::move(m));
  return kExitOk;
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

int runCapacity(Settings& s, const Invocation& inv) {
  const int points = static_cast<int>(s.getInt("points", 256, 2, 1 << 16));
  const int realizations = static_cast<int>(s.getInt("realizations", 10000, 1, 1 << 24));
  const int k = static_cast<int>(s.getInt("k", 1, 1, 4096));
  const auto snrGrid = s.getGrid("snr_db", "22", 1.0);
  const int samples = static_cast<int>(s.getInt("samples", 2000, 2, 1 << 30));
  const int refSamples = static_cast<int>(s.getInt("reference_samples", 100000, 2, 1 << 30));
  const auto seed = static_cast<std::uint64_t>(s.getInt("seed", 1, 0, INT64_MAX));
  const int workers = static_cast<int>(s.getInt("workers", 0, 0, 4096));
  for (double snrDb : snrGrid) {
    if (!std::isfinite(snrDb)) s.reject("snr_db", "values must be finite");
  }
  const int side = static_cast<int>(std::lround(std::sqrt(points)));
  const bool withQam = k == 1 && side * side == points && points >= 4;

  const Output out = prepareOutput(inv);
  const auto start = std::chrono::steady_clock::now();
  auto file = openOut(out.csv);
  CsvWriter csv(file, {"snr_db", "source", "realization", "bits_per_use", "std_error"});
  nlohmann::json summary = nlohmann::json::array();
  for (std::size_t si = 0; si < snrGrid.size(); ++si) {
    const double snr = std::pow(10.0, snrGrid[si] / 10.0);
    std::vector<MutualInformationEstimate> est(static_cast<std::size_t>(realizations));
    parallelFor(static_cast<std::uint64_t>(realizations), workers, [&](std::uint64_t r) {
      const auto pts = randomGaussianPoints(points, k, deriveSeed(seed, Stream::Constellation, r));
      est[r] = mutualInformationMC(pts, snr, samples,
                                   deriveSeed(seed, Stream::MutualInformation, r, si));
    });
    std::vector<double> rates;
    for (int r = 0; r < realizations; ++r) {
      rates.push_back(est[r].bitsPerUse);
      csv.row({formatValue(snrGrid[si]), "random", std::to_string(r), formatValue(est[r].bitsPerUse),
               formatValue(est[r].standardError)});
    }
    nlohmann::json row = {{"snr_db", snrGrid[si]},
                          {"p05", percentile(rates, 0.05)},
                          {"median", percentile(rates, 0.5)},
                          {"p95", percentile(rates, 0.95)}};
    if (withQam) {
      const auto qam = qamConstellation(points);
      const auto ref = mutualInformationMC(qam, snr, refSamples,
                                           deriveSeed(seed, Stream::MutualInformation, 0, si + 1000003));
      csv.row({formatValue(snrGrid[si]), "qam", "-1", formatValue(ref.bitsPerUse),
               formatValue(ref.standardError)});
      row["qam"] = ref.bitsPerUse;
    }
    if (!inv.quiet) std::cerr << "  SNR " << formatValue(snrGrid[si]) << " dB: " << row.dump() << "\n";
    summary.push_back(row);
  }
  RunManifest m;
  m.seed = seed;
  m.elapsedSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m.results = {{"snr_points", summary}};
  finish(inv, out, s, std::move(m));
  return kExitOk;
}

int dispatch(Settings& s, const Invocation& inv) {
  if (inv.command == "ser") return runSer(s, inv);
  if (inv.command == "fer") return runFer(s, inv);
  if (inv.command == "agree") return runAgree(s, inv);
  if (inv.command == "train-sweep") return runTrainSweep(s, inv);
  if (inv.command == "analytic") return runAnalytic(s, inv);
  if (inv.command == "capacity") return runCapacity(s, inv);
  throw ConfigError("unknown command " + inv.command);
}

}  // namespace

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args);
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Layered media-based modulation simulator", "mbmsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", toolVersion() + " (" + gitDescribe() + ")");

  Invocation inv;
  inv.argv = args;
  std::map<std::string, std::map<std::string, std::string>> flagValues;
  std::map<std::string, CLI::App*> subs;
  std::set<std::string> knownKeys;
  std::set<std::string> commandNames;
  for (const auto& doc : commandDocs()) {
    commandNames.insert(doc.name);
    auto* sub = app.add_subcommand(doc.name, doc.summary);
    sub->add_option("--preset", inv.preset, "built-in configuration (see 'mbmsim presets')");
    sub->add_option("--config", inv.configPath, "configuration file");
    sub->add_option("--out", inv.outDir, "output directory (default $MBMSIM_OUTPUT_DIR or .)");
    sub->add_option("--name", inv.name, "output file stem");
    sub->add_flag("--quiet", inv.quiet, "no progress output");
    for (const auto& key : doc.keys) {
      knownKeys.insert(key.key);
      sub->add_option(flagFor(key.key), flagValues[doc.name][key.key], key.help);
    }
    subs[doc.name] = sub;
  }
  auto* presetsCmd = app.add_subcommand("presets", "list built-in configurations");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }

  if (presetsCmd->parsed()) {
    for (const auto& [name, text] : presets()) std::cout << "# preset " << name << "\n" << text << "\n";
    return kExitOk;
  }

  try {
    const CommandDoc* doc = nullptr;
    for (const auto& d : commandDocs()) {
      if (subs[d.name]->parsed()) doc = &d;
    }
    inv.command = doc->name;
    std::set<std::string> allowed;
    for (const auto& key : doc->keys) allowed.insert(key.key);
    Settings settings(inv.command, allowed, knownKeys, commandNames);

    if (!inv.preset.empty()) {
      const auto it = presets().find(inv.preset);
      if (it == presets().end()) throw ConfigError("--preset: unknown preset '" + inv.preset + "'");
      settings.merge(ConfigFile::parse(it->second, "preset " + inv.preset));
    }
    if (!inv.configPath.empty()) settings.merge(ConfigFile::load(inv.configPath));
    for (const auto& key : doc->keys) {
      const std::string flag = flagFor(key.key);
      if (subs[inv.command]->count(flag) > 0) {
        settings.set(key.key, flagValues[inv.command][key.key], flag);
      }
    }
    return dispatch(settings, inv);
  } catch (const ConfigError& e) {
    std::cerr << "mbmsim: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "mbmsim: error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}

}  // namespace mbm::cli
