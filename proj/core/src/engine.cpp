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

#include "mbm/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <memory>
#include <stdexcept>
#include <thread>

namespace mbm {
namespace {

struct Tally {
  std::uint64_t trials = 0;
  std::uint64_t frames = 0;
  std::uint64_t symbolErrors = 0;
  std::uint64_t frameErrors = 0;
  std::uint64_t decodedSymbolErrors = 0;

  void add(const Tally& o) {
    trials += o.trials;
    frames += o.frames;
    symbolErrors += o.symbolErrors;
    frameErrors += o.frameErrors;
    decodedSymbolErrors += o.decodedSymbolErrors;
  }
};

struct PointRun {
  Tally tally;
  double seconds = 0.0;
  bool censored = false;
};

int resolveWorkers(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs chunks of `chunkFrames` frames in waves of `workers`, folding them in
/// index order and stopping at the first chunk boundary that satisfies the
/// rule. `errorsOf` selects the counter compared against minErrors; pass
/// nullptr to run exactly maxTrials frames.
template <typename ChunkFn>
PointRun runChunked(const SweepSpec& spec, ChunkFn&& chunk,
                    std::uint64_t (*errorsOf)(const Tally&)) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const int workers = resolveWorkers(spec.workers);
  const std::uint64_t maxFrames = spec.stopping.maxTrials;
  const std::uint64_t chunkFrames = spec.batchSize;
  const std::uint64_t numChunks = (maxFrames + chunkFrames - 1) / chunkFrames;

  PointRun run;
  std::vector<Tally> wave(static_cast<std::size_t>(workers));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
  for (std::uint64_t base = 0; base < numChunks; base += static_cast<std::uint64_t>(workers)) {
    const auto inWave = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), numChunks - base));
    auto work = [&](int slot) {
      try {
        const std::uint64_t index = base + static_cast<std::uint64_t>(slot);
        const std::uint64_t first = index * chunkFrames;
        const std::uint64_t count = std::min(chunkFrames, maxFrames - first);
        wave[slot] = chunk(index, first, count);
      } catch (...) {
        failures[slot] = std::current_exception();
      }
    };
    if (inWave == 1) {
      work(0);
    } else {
      std::vector<std::jthread> threads;
      threads.reserve(static_cast<std::size_t>(inWave - 1));
      for (int slot = 1; slot < inWave; ++slot) threads.emplace_back(work, slot);
      work(0);
    }
    for (int slot = 0; slot < inWave; ++slot) {
      if (failures[slot]) std::rethrow_exception(failures[slot]);
    }

    bool done = false;
    for (int slot = 0; slot < inWave && !done; ++slot) {
      run.tally.add(wave[slot]);
      done = run.tally.frames >= maxFrames ||
             (errorsOf != nullptr && errorsOf(run.tally) >= spec.stopping.minErrors);
    }
    run.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (done) break;
    if (spec.stopping.maxWallSecondsPerPoint > 0.0 &&
        run.seconds >= spec.stopping.maxWallSecondsPerPoint) {
      run.censored = true;
      break;
    }
  }
  return run;
}

/// Detection on a received vector already scaled by 1/sqrt(E).
class Detector {
 public:
  explicit Detector(const SweepSpec& spec)
      : kind_(spec.detector), cap_(spec.exhaustiveCap), layered_(spec.layered) {}

  MessageVector operator()(const ComplexVector& r, const LayeredConstellation& c) {
    if (kind_ == DetectorKind::Exhaustive) return detectExhaustive(r, c, cap_).message;
    return layered_.detect(r, c).message;
  }

 private:
  DetectorKind kind_;
  std::uint64_t cap_;
  LayeredDetector layered_;
};

/// The true constellation and the receiver's view of it.
struct ChannelState {
  LayeredConstellation truth;
  LayeredConstellation estimate;
};

ChannelState makeState(const SweepSpec& spec, LayeredConstellation truth,
                       std::uint64_t trainingSeed) {
  if (!spec.training) return {truth, truth};
  auto estimate = trainPerUnit(truth, spec.training->pilotN0, spec.training->reps, trainingSeed,
                               spec.training->scheme);
  return {std::move(truth), std::move(estimate)};
}

/// Supplies the constellation for each (frame, use), honouring the mode.
class ConstellationSource {
 public:
  explicit ConstellationSource(const SweepSpec& spec) : spec_(spec) {
    if (spec.mode == ConstellationMode::FixedSingle) {
      fixed_ = std::make_shared<const ChannelState>(*drawBatch(0));
    }
  }

  /// Called once per chunk before any frame of it.
  void beginChunk(std::uint64_t chunkIndex) {
    if (spec_.mode == ConstellationMode::RedrawPerBatch) current_ = drawBatch(chunkIndex);
  }

  /// Called once per frame; uses are requested in order 0, 1, ...
  void beginFrame(std::uint64_t frame) {
    if (spec_.mode == ConstellationMode::RedrawPerUse) {
      frameRng_ = makeRng(spec_.seed, Stream::Constellation, frame, 1);
      frame_ = frame;
    }
  }

  const ChannelState& forUse(int use) {
    switch (spec_.mode) {
      case ConstellationMode::FixedSingle:
        return *fixed_;
      case ConstellationMode::RedrawPerBatch:
        return *current_;
      case ConstellationMode::RedrawPerUse:
        break;
    }
    auto truth = generateConstellation(spec_.numUnits, spec_.bitsPerUnit, spec_.dims(), frameRng_);
    current_ = makeState(spec_, std::move(truth),
                         deriveSeed(spec_.seed, Stream::Training, frame_,
                                    static_cast<std::uint64_t>(use) + 1));
    return *current_;
  }

 private:
  std::optional<ChannelState> drawBatch(std::uint64_t batch) const {
    auto truth = generateConstellation(spec_.numUnits, spec_.bitsPerUnit, spec_.dims(),
                                       deriveSeed(spec_.seed, Stream::Constellation, batch, 0));
    return makeState(spec_, std::move(truth), deriveSeed(spec_.seed, Stream::Training, batch, 0));
  }

  const SweepSpec& spec_;
  std::shared_ptr<const ChannelState> fixed_;
  std::optional<ChannelState> current_;
  Rng frameRng_;
  std::uint64_t frame_ = 0;
};

ChannelParams channelFor(const SweepSpec& spec, double ebN0Db) {
  ChannelParams params;
  params.perUnitEnergy = spec.perUnitEnergy;
  params.timeSlots = spec.timeSlots;
  params.n0 = ebN0ToN0(ebN0Db, spec.numUnits, spec.perUnitEnergy, spec.informationRate());
  return params;
}

ComplexVector receive(const ComplexVector& point, const ChannelParams& params, Rng& rng) {
  return transmit(point, params, rng) / std::sqrt(params.perUnitEnergy);
}

CurvePoint finishPoint(double ebN0Db, const PointRun& run, bool coded) {
  const Tally& t = run.tally;
  CurvePoint p;
  p.ebN0Db = ebN0Db;
  p.trials = t.trials;
  p.frames = t.frames;
  p.symbolErrors = t.symbolErrors;
  p.frameErrors = t.frameErrors;
  p.decodedSymbolErrors = t.decodedSymbolErrors;
  p.ser = t.trials ? static_cast<double>(t.symbolErrors) / static_cast<double>(t.trials) : 0.0;
  p.fer = t.frames ? static_cast<double>(t.frameErrors) / static_cast<double>(t.frames) : 0.0;
  const auto ci = coded ? wilsonInterval(t.frameErrors, t.frames)
                        : wilsonInterval(t.symbolErrors, t.trials);
  p.ciLow = ci.low;
  p.ciHigh = ci.high;
  p.ci95 = ci.halfWidth();
  p.seconds = run.seconds;
  p.throughputSymbolsPerSec = run.seconds > 0.0 ? static_cast<double>(t.trials) / run.seconds : 0.0;
  p.censored = run.censored;
  return p;
}

std::uint64_t symbolErrorsOf(const Tally& t) { return t.symbolErrors; }
std::uint64_t frameErrorsOf(const Tally& t) { return t.frameErrors; }

}  // namespace

double SweepSpec::informationRate() const {
  if (!fec) return static_cast<double>(rate());
  return rate() * static_cast<double>(fec->dimension) / static_cast<double>(fec->length);
}

int SweepSpec::usesPerFrame() const {
  if (!fec) return 1;
  return fec->length / (rate() / fec->fieldBits);
}

void SweepSpec::validate() const {
  if (numUnits < 1 || bitsPerUnit < 1 || receiveDims < 1 || timeSlots < 1) {
    throw std::invalid_argument("N, R_n, K and time slots must be positive");
  }
  if (rate() > 64) throw std::invalid_argument("R = N R_n must be at most 64");
  if (!(perUnitEnergy > 0.0)) throw std::invalid_argument("per-unit energy must be positive");
  if (ebN0Grid.empty()) throw std::invalid_argument("Eb/N0 grid is empty");
  for (std::size_t i = 0; i < ebN0Grid.size(); ++i) {
    const double v = ebN0Grid[i];
    if (std::isnan(v) || (std::isinf(v) && v < 0)) {
      throw std::invalid_argument("Eb/N0 values must be finite or +inf");
    }
    if (i > 0 && !(v > ebN0Grid[i - 1])) {
      throw std::invalid_argument("Eb/N0 grid must be strictly increasing");
    }
  }
  if (stopping.maxTrials < 1) throw std::invalid_argument("max trials must be >= 1");
  if (stopping.maxWallSecondsPerPoint < 0.0) throw std::invalid_argument("wall cap must be >= 0");
  if (batchSize < 1) throw std::invalid_argument("batch size must be >= 1");
  if (workers < 0) throw std::invalid_argument("workers must be >= 0");
  if (detector == DetectorKind::Layered) layered.validate(numUnits);
  if (detector == DetectorKind::Exhaustive && rate() > 63) {
    throw std::invalid_argument("exhaustive search needs R < 64");
  }
  if (detector == DetectorKind::Exhaustive && (std::uint64_t{1} << rate()) > exhaustiveCap) {
    throw std::invalid_argument("constellation exceeds the exhaustive-search cap; use the layered detector");
  }
  if (training) {
    if (training->pilotN0 < 0.0) throw std::invalid_argument("pilot N0 must be >= 0");
    if (training->reps < 1) throw std::invalid_argument("training repetitions must be >= 1");
  }
  if (fec) {
    RsCode code(fec->fieldBits, fec->length, fec->dimension);
    SymbolMapping{numUnits, bitsPerUnit, fec->fieldBits}.validate();
    if (fec->length % (rate() / fec->fieldBits) != 0) {
      throw std::invalid_argument("code length must be a multiple of symbols per channel use");
    }
  }
}

WilsonInterval wilsonInterval(std::uint64_t errors, std::uint64_t trials) {
  if (trials == 0) return {0.0, 1.0};
  if (errors > trials) throw std::invalid_argument("errors exceed trials");
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double z2n = z * z / n;
  const double centre = (p + z2n / 2.0) / (1.0 + z2n);
  const double spread = z * std::sqrt(p * (1.0 - p) / n + z2n / (4.0 * n)) / (1.0 + z2n);
  WilsonInterval ci{std::max(0.0, centre - spread), std::min(1.0, centre + spread)};
  if (errors == 0) ci.low = 0.0;
  if (errors == trials) ci.high = 1.0;
  return ci;
}

std::vector<CurvePoint> runUncodedSweep(const SweepSpec& spec, const PointObserver& observer) {
  spec.validate();
  if (spec.fec) throw std::invalid_argument("uncoded sweep given an FEC spec");
  const ConstellationSource prototype(spec);

  std::vector<CurvePoint> out;
  for (std::size_t pi = 0; pi < spec.ebN0Grid.size(); ++pi) {
    const double ebN0 = spec.ebN0Grid[pi];
    const ChannelParams params = channelFor(spec, ebN0);
    auto chunk = [&](std::uint64_t index, std::uint64_t first, std::uint64_t count) {
      ConstellationSource source = prototype;
      source.beginChunk(index);
      Detector detect(spec);
      Tally t;
      for (std::uint64_t f = first; f < first + count; ++f) {
        source.beginFrame(f);
        const ChannelState& state = source.forUse(0);
        Rng msgRng = makeRng(spec.seed, Stream::Message, pi, f);
        Rng noiseRng = makeRng(spec.seed, Stream::Noise, pi, f);
        const MessageVector m = randomMessage(state.truth, msgRng);
        const ComplexVector r = receive(mapToPoint(state.truth, m), params, noiseRng);
        const bool wrong = detect(r, state.estimate) != m;
        ++t.trials;
        ++t.frames;
        t.symbolErrors += wrong;
        t.frameErrors += wrong;
      }
      return t;
    };
    const PointRun run = runChunked(spec, chunk, &symbolErrorsOf);
    out.push_back(finishPoint(ebN0, run, false));
    if (observer) observer(out.back());
  }
  return out;
}

std::vector<CurvePoint> runCodedSweep(const SweepSpec& spec, const PointObserver& observer) {
  spec.validate();
  if (!spec.fec) throw std::invalid_argument("coded sweep needs an FEC spec");
  const RsCode code(spec.fec->fieldBits, spec.fec->length, spec.fec->dimension);
  const SymbolMapping mapping{spec.numUnits, spec.bitsPerUnit, spec.fec->fieldBits};
  const int uses = spec.usesPerFrame();
  const ConstellationSource prototype(spec);
  const std::uint64_t symbolMask = (std::uint64_t{1} << spec.fec->fieldBits) - 1;

  std::vector<CurvePoint> out;
  for (std::size_t pi = 0; pi < spec.ebN0Grid.size(); ++pi) {
    const double ebN0 = spec.ebN0Grid[pi];
    const ChannelParams params = channelFor(spec, ebN0);
    auto chunk = [&](std::uint64_t index, std::uint64_t first, std::uint64_t count) {
      ConstellationSource source = prototype;
      source.beginChunk(index);
      Detector detect(spec);
      Tally t;
      std::vector<Symbol> info(static_cast<std::size_t>(code.dimension()));
      std::vector<MessageVector> detected(static_cast<std::size_t>(uses));
      for (std::uint64_t f = first; f < first + count; ++f) {
        source.beginFrame(f);
        Rng msgRng = makeRng(spec.seed, Stream::Message, pi, f);
        Rng noiseRng = makeRng(spec.seed, Stream::Noise, pi, f);
        for (auto& s : info) s = static_cast<Symbol>(msgRng() & symbolMask);
        const auto sent = mapCodewordToMessages(code.encode(info), mapping);
        for (int u = 0; u < uses; ++u) {
          const ChannelState& state = source.forUse(u);
          const ComplexVector r = receive(mapToPoint(state.truth, sent[u]), params, noiseRng);
          detected[u] = detect(r, state.estimate);
          t.symbolErrors += detected[u] != sent[u];
        }
        const RsDecodeResult decoded = code.decode(mapMessagesToCodeword(detected, mapping));
        std::uint64_t wrongInfo = 0;
        for (std::size_t i = 0; i < info.size(); ++i) wrongInfo += decoded.message[i] != info[i];
        t.trials += static_cast<std::uint64_t>(uses);
        ++t.frames;
        t.frameErrors += (!decoded.success || wrongInfo > 0);
        t.decodedSymbolErrors += wrongInfo;
      }
      return t;
    };
    const PointRun run = runChunked(spec, chunk, &frameErrorsOf);
    out.push_back(finishPoint(ebN0, run, true));
    if (observer) observer(out.back());
  }
  return out;
}

std::vector<AgreementPoint> runAgreementSweep(const SweepSpec& spec) {
  spec.validate();
  if (spec.rate() > 63 || (std::uint64_t{1} << spec.rate()) > spec.exhaustiveCap) {
    throw std::invalid_argument("agreement study needs exhaustive search within the cap");
  }
  spec.layered.validate(spec.numUnits);
  const ConstellationSource prototype(spec);

  std::vector<AgreementPoint> out;
  for (std::size_t pi = 0; pi < spec.ebN0Grid.size(); ++pi) {
    const double ebN0 = spec.ebN0Grid[pi];
    const ChannelParams params = channelFor(spec, ebN0);
    auto chunk = [&](std::uint64_t index, std::uint64_t first, std::uint64_t count) {
      ConstellationSource source = prototype;
      source.beginChunk(index);
      LayeredDetector layered(spec.layered);
      Tally t;
      for (std::uint64_t f = first; f < first + count; ++f) {
        source.beginFrame(f);
        const ChannelState& state = source.forUse(0);
        Rng msgRng = makeRng(spec.seed, Stream::Message, pi, f);
        Rng noiseRng = makeRng(spec.seed, Stream::Noise, pi, f);
        const MessageVector m = randomMessage(state.truth, msgRng);
        const ComplexVector r = receive(mapToPoint(state.truth, m), params, noiseRng);
        const DetectionResult full = detectExhaustive(r, state.estimate, spec.exhaustiveCap);
        const DetectionResult greedy = layered.detect(r, state.estimate);
        const bool agree =
            greedy.message == full.message ||
            std::abs(greedy.distanceSquared - full.distanceSquared) <=
                1e-9 * (1.0 + full.distanceSquared);
        ++t.trials;
        ++t.frames;
        // symbolErrors counts disagreements here
        t.symbolErrors += !agree;
      }
      return t;
    };
    const PointRun run = runChunked(spec, chunk, nullptr);
    AgreementPoint p;
    p.ebN0Db = ebN0;
    p.trials = run.tally.trials;
    p.agreements = run.tally.trials - run.tally.symbolErrors;
    p.rate = p.trials ? static_cast<double>(p.agreements) / static_cast<double>(p.trials) : 0.0;
    p.ci = wilsonInterval(p.agreements, p.trials);
    p.seconds = run.seconds;
    out.push_back(p);
  }
  return out;
}

void parallelFor(std::uint64_t count, int workers, const std::function<void(std::uint64_t)>& fn) {
  const auto threads = static_cast<std::uint64_t>(resolveWorkers(workers));
  const std::uint64_t used = std::min(threads, count);
  if (used <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> failures(used);
  auto work = [&](std::uint64_t slot) {
    try {
      for (std::uint64_t i = slot; i < count; i += used) fn(i);
    } catch (...) {
      failures[slot] = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::uint64_t slot = 1; slot < used; ++slot) pool.emplace_back(work, slot);
    work(0);
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
}

const char* toString(ConstellationMode mode) {
  switch (mode) {
    case ConstellationMode::FixedSingle:
      return "fixed-single";
    case ConstellationMode::RedrawPerBatch:
      return "redraw-per-batch";
    case ConstellationMode::RedrawPerUse:
      return "redraw-per-use";
  }
  return "?";
}

const char* toString(DetectorKind kind) {
  return kind == DetectorKind::Exhaustive ? "exhaustive" : "layered";
}

std::optional<ConstellationMode> parseConstellationMode(const std::string& text) {
  for (auto mode : {ConstellationMode::FixedSingle, ConstellationMode::RedrawPerBatch,
                    ConstellationMode::RedrawPerUse}) {
    if (text == toString(mode)) return mode;
  }
  return std::nullopt;
}

std::optional<DetectorKind> parseDetectorKind(const std::string& text) {
  if (text == "exhaustive") return DetectorKind::Exhaustive;
  if (text == "layered") return DetectorKind::Layered;
  return std::nullopt;
}

}  // namespace mbm
