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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mbm/detect.hpp"
#include "mbm/fec.hpp"
#include "mbm/model.hpp"
#include "mbm/train.hpp"

namespace mbm {

enum class ConstellationMode {
  /// One realization for the whole sweep.
  FixedSingle,
  /// A fresh realization every `batchSize` frames; batch b uses the same
  /// realization at every Eb/N0 point.
  RedrawPerBatch,
  /// A fresh realization for every channel use. Symbol errors inside a coded
  /// frame are then independent.
  RedrawPerUse,
};

enum class DetectorKind { Exhaustive, Layered };

struct StoppingRule {
  std::uint64_t maxTrials = 1'000'000;  ///< frames (channel uses when uncoded)
  std::uint64_t minErrors = 100;        ///< frame errors (symbol errors when uncoded)
  double maxWallSecondsPerPoint = 0.0;  ///< 0 = unlimited
};

struct FecSpec {
  int fieldBits = 8;
  int length = 128;
  int dimension = 120;
};

struct TrainingSpec {
  double pilotN0 = 0.0;
  int reps = 1;
  TrainingScheme scheme = TrainingScheme::HadamardDefaults;
};

struct SweepSpec {
  int numUnits = 1;
  int bitsPerUnit = 8;
  int receiveDims = 8;
  int timeSlots = 1;
  double perUnitEnergy = 1.0;

  DetectorKind detector = DetectorKind::Exhaustive;
  DetectorConfig layered;
  std::uint64_t exhaustiveCap = kDefaultExhaustiveCap;

  std::vector<double> ebN0Grid;  ///< dB, strictly increasing; +inf means N0 = 0
  StoppingRule stopping;
  ConstellationMode mode = ConstellationMode::RedrawPerBatch;
  std::uint64_t batchSize = 1000;  ///< frames per work chunk and per redraw

  std::optional<FecSpec> fec;
  std::optional<TrainingSpec> training;

  std::uint64_t seed = 1;
  int workers = 0;  ///< 0 = hardware concurrency

  int rate() const { return numUnits * bitsPerUnit; }
  int dims() const { return receiveDims * timeSlots; }
  /// Information bits per channel use: R, or R D / L when coded.
  double informationRate() const;
  int usesPerFrame() const;
  void validate() const;
};

struct CurvePoint {
  double ebN0Db = 0.0;
  std::uint64_t trials = 0;        ///< channel uses
  std::uint64_t frames = 0;        ///< coded frames; equals trials when uncoded
  std::uint64_t symbolErrors = 0;  ///< wrong channel-use messages
  std::uint64_t frameErrors = 0;   ///< decode failures or miscorrections; symbolErrors when uncoded
  std::uint64_t decodedSymbolErrors = 0;  ///< wrong information symbols after decoding
  double ser = 0.0;
  double fer = 0.0;
  double ciLow = 0.0;   ///< Wilson 95% on fer (coded) or ser (uncoded)
  double ciHigh = 0.0;
  double ci95 = 0.0;    ///< half-width of [ciLow, ciHigh]
  double seconds = 0.0;
  double throughputSymbolsPerSec = 0.0;
  bool censored = false;  ///< stopped on the wall-clock cap
};

struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
  double halfWidth() const { return 0.5 * (high - low); }
};

/// 95% Wilson score interval for errors / trials.
WilsonInterval wilsonInterval(std::uint64_t errors, std::uint64_t trials);

using PointObserver = std::function<void(const CurvePoint&)>;

/// Uncoded SER sweep. Counts are identical for any worker count: trials run
/// in chunks of batchSize, chunks are reduced in index order and the run
/// stops at the first chunk boundary that meets the stopping rule.
std::vector<CurvePoint> runUncodedSweep(const SweepSpec& spec, const PointObserver& observer = {});

/// Coded FER sweep; requires spec.fec.
std::vector<CurvePoint> runCodedSweep(const SweepSpec& spec, const PointObserver& observer = {});

struct AgreementPoint {
  double ebN0Db = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t agreements = 0;
  double rate = 0.0;
  WilsonInterval ci;
  double seconds = 0.0;
};

/// Layered-vs-exhaustive agreement per Eb/N0 point; runs maxTrials trials.
std::vector<AgreementPoint> runAgreementSweep(const SweepSpec& spec);

/// Calls fn(i) for i in [0, count) on up to `workers` threads (0 = all
/// cores). Indices are dealt round-robin, so fn must not depend on which
/// thread runs it. The first exception thrown is rethrown.
void parallelFor(std::uint64_t count, int workers, const std::function<void(std::uint64_t)>& fn);

const char* toString(ConstellationMode mode);
const char* toString(DetectorKind kind);
std::optional<ConstellationMode> parseConstellationMode(const std::string& text);
std::optional<DetectorKind> parseDetectorKind(const std::string& text);

}  // namespace mbm
