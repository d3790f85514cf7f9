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

#include <atomic>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "mbm/engine.hpp"

namespace mbm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SweepSpec smallSpec() {
  SweepSpec s;
  s.numUnits = 2;
  s.bitsPerUnit = 3;
  s.receiveDims = 2;
  s.detector = DetectorKind::Exhaustive;
  s.ebN0Grid = {0.0, 4.0};
  s.stopping.maxTrials = 2000;
  s.stopping.minErrors = 1000000;
  s.batchSize = 250;
  s.workers = 1;
  s.seed = 17;
  return s;
}

bool sameCounts(const CurvePoint& a, const CurvePoint& b) {
  return a.trials == b.trials && a.frames == b.frames && a.symbolErrors == b.symbolErrors &&
         a.frameErrors == b.frameErrors && a.decodedSymbolErrors == b.decodedSymbolErrors;
}

TEST(Wilson, MatchesQuadraticRoots) {
  for (auto [e, n] : {std::pair{1, 10}, {3, 100}, {40, 97}, {999, 1000}, {7, 1000000}}) {
    const auto w = wilsonInterval(e, n);
    const auto [lo, hi] = oracle::wilsonRoots(e, n);
    EXPECT_NEAR(w.low, lo, 1e-14);
    EXPECT_NEAR(w.high, hi, 1e-14);
    const double p = static_cast<double>(e) / n;
    EXPECT_LE(w.low, p);
    EXPECT_GE(w.high, p);
  }
}

TEST(Wilson, Boundaries) {
  const auto none = wilsonInterval(0, 100);
  EXPECT_EQ(none.low, 0.0);
  EXPECT_NEAR(none.high, 0.036994, 1e-6);
  const auto half = wilsonInterval(50, 100);
  EXPECT_NEAR(half.low + half.high, 1.0, 1e-15);
  EXPECT_EQ(wilsonInterval(100, 100).high, 1.0);
  EXPECT_NEAR(half.halfWidth(), 0.5 * (half.high - half.low), 0.0);
  EXPECT_THROW(wilsonInterval(5, 4), std::invalid_argument);
  const auto empty = wilsonInterval(0, 0);
  EXPECT_EQ(empty.low, 0.0);
  EXPECT_EQ(empty.high, 1.0);
}

TEST(Wilson, IntervalsAreNestedInTrials) {
  for (int n = 10; n <= 10000; n *= 10) {
    const auto small = wilsonInterval(n / 10, n);
    const auto large = wilsonInterval(n, 10 * n);
    EXPECT_LT(large.halfWidth(), small.halfWidth());
    EXPECT_GE(small.low, 0.0);
    EXPECT_LE(small.high, 1.0);
  }
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (int workers : {0, 1, 3, 8}) {
    std::vector<std::atomic<int>> hits(101);
    parallelFor(101, workers, [&](std::uint64_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  EXPECT_THROW(parallelFor(10, 2,
                           [](std::uint64_t i) {
                             if (i == 7) throw std::runtime_error("boom");
                           }),
               std::runtime_error);
}

TEST(Names, RoundTrip) {
  for (auto m : {ConstellationMode::FixedSingle, ConstellationMode::RedrawPerBatch,
                 ConstellationMode::RedrawPerUse}) {
    EXPECT_EQ(parseConstellationMode(toString(m)), m);
  }
  for (auto k : {DetectorKind::Exhaustive, DetectorKind::Layered}) {
    EXPECT_EQ(parseDetectorKind(toString(k)), k);
  }
  EXPECT_FALSE(parseConstellationMode("sometimes"));
  EXPECT_FALSE(parseDetectorKind("psychic"));
}

TEST(SweepSpec, Validation) {
  auto s = smallSpec();
  EXPECT_NO_THROW(s.validate());
  s.ebN0Grid = {1.0, 1.0};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.ebN0Grid = {NAN};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.ebN0Grid = {-kInf};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.ebN0Grid = {0.0, kInf};
  EXPECT_NO_THROW(s.validate());
  s.exhaustiveCap = 32;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = smallSpec();
  s.fec = FecSpec{4, 15, 11};  // 6 bits per use is not a multiple of 4
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.bitsPerUnit = 4;
  s.fec = FecSpec{4, 15, 11};  // 15 symbols over 2-symbol uses
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.fec = FecSpec{4, 14, 10};
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.usesPerFrame(), 7);
  EXPECT_DOUBLE_EQ(s.informationRate(), 8.0 * 10.0 / 14.0);
}

TEST(UncodedSweep, NoiselessPointHasNoErrors) {
  auto s = smallSpec();
  s.ebN0Grid = {kInf};
  const auto pts = runUncodedSweep(s);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].trials, 2000u);
  EXPECT_EQ(pts[0].symbolErrors, 0u);
  EXPECT_EQ(pts[0].ser, 0.0);
  EXPECT_EQ(pts[0].ciLow, 0.0);
}

TEST(UncodedSweep, CountsIndependentOfWorkerCount) {
  for (auto mode : {ConstellationMode::FixedSingle, ConstellationMode::RedrawPerBatch,
                    ConstellationMode::RedrawPerUse}) {
    auto s = smallSpec();
    s.mode = mode;
    s.stopping.minErrors = 150;
    const auto serial = runUncodedSweep(s);
    for (int workers : {2, 3}) {
      s.workers = workers;
      const auto parallel = runUncodedSweep(s);
      ASSERT_EQ(parallel.size(), serial.size());
      for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_TRUE(sameCounts(serial[i], parallel[i])) << toString(mode) << " workers " << workers;
      }
    }
  }
}

TEST(UncodedSweep, LayeredCountsIndependentOfWorkerCount) {
  auto s = smallSpec();
  s.numUnits = 3;
  s.detector = DetectorKind::Layered;
  s.layered = DetectorConfig::standard(3, 2, 4);
  const auto serial = runUncodedSweep(s);
  s.workers = 3;
  const auto parallel = runUncodedSweep(s);
  for (std::size_t i = 0; i < serial.size(); ++i) EXPECT_TRUE(sameCounts(serial[i], parallel[i]));
}

TEST(UncodedSweep, StopsAtFirstChunkMeetingTheRule) {
  auto s = smallSpec();
  s.ebN0Grid = {-2.0};
  s.stopping.minErrors = 60;
  s.stopping.maxTrials = 100000;
  s.batchSize = 100;
  const auto pt = runUncodedSweep(s).front();
  EXPECT_GE(pt.symbolErrors, 60u);
  EXPECT_EQ(pt.trials % 100, 0u);
  EXPECT_LT(pt.trials, 100000u);
  // one chunk fewer would not have been enough
  s.stopping.maxTrials = pt.trials - 100;
  EXPECT_LT(runUncodedSweep(s).front().symbolErrors, 60u);
}

TEST(UncodedSweep, SerDecreasesWithEbN0) {
  auto s = smallSpec();
  s.ebN0Grid = {-4.0, 0.0, 4.0, 8.0};
  s.stopping.maxTrials = 20000;
  const auto pts = runUncodedSweep(s);
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LT(pts[i].ser, pts[i - 1].ser);
  for (const auto& p : pts) {
    EXPECT_EQ(p.frameErrors, p.symbolErrors);
    EXPECT_LE(p.ciLow, p.ser);
    EXPECT_GE(p.ciHigh, p.ser);
  }
}

TEST(UncodedSweep, ObserverSeesEveryPointInOrder) {
  auto s = smallSpec();
  s.ebN0Grid = {-1.0, 0.0, 1.0};
  std::vector<double> seen;
  runUncodedSweep(s, [&](const CurvePoint& p) { seen.push_back(p.ebN0Db); });
  EXPECT_EQ(seen, s.ebN0Grid);
}

TEST(UncodedSweep, WallClockCapCensors) {
  auto s = smallSpec();
  s.ebN0Grid = {0.0};
  s.stopping.maxTrials = 1'000'000'000;
  s.stopping.maxWallSecondsPerPoint = 0.05;
  s.batchSize = 100;
  const auto pt = runUncodedSweep(s).front();
  EXPECT_TRUE(pt.censored);
  EXPECT_LT(pt.trials, s.stopping.maxTrials);
}

TEST(UncodedSweep, PerfectTrainingMatchesKnownChannel) {
  auto s = smallSpec();
  const auto known = runUncodedSweep(s);
  s.training = TrainingSpec{0.0, 1, TrainingScheme::Bypass};
  const auto trained = runUncodedSweep(s);
  for (std::size_t i = 0; i < known.size(); ++i) EXPECT_TRUE(sameCounts(known[i], trained[i]));

  s.training = TrainingSpec{3.0, 1, TrainingScheme::HadamardDefaults};
  const auto noisy = runUncodedSweep(s);
  EXPECT_GT(noisy.back().ser, known.back().ser);
}

TEST(UncodedSweep, TrainingErrorVanishesWithPilotEnergy) {
  auto s = smallSpec();
  s.ebN0Grid = {2.0};
  s.stopping.maxTrials = 20000;
  const double reference = runUncodedSweep(s).front().ser;
  double previous = 1.0;
  for (double pilotN0 : {1.0, 0.1, 0.01, 0.001}) {
    s.training = TrainingSpec{pilotN0, 1, TrainingScheme::HadamardDefaults};
    const double ser = runUncodedSweep(s).front().ser;
    EXPECT_LE(ser, previous * 1.05);
    previous = ser;
  }
  EXPECT_NEAR(previous, reference, 0.1 * reference);
}

TEST(UncodedSweep, RejectsCodedSpec) {
  auto s = smallSpec();
  s.bitsPerUnit = 4;
  s.fec = FecSpec{4, 14, 10};
  EXPECT_THROW(runUncodedSweep(s), std::invalid_argument);
  s.fec.reset();
  EXPECT_THROW(runCodedSweep(s), std::invalid_argument);
}

SweepSpec codedSpec(int dimension) {
  SweepSpec s;
  s.numUnits = 1;
  s.bitsPerUnit = 4;
  s.receiveDims = 4;
  s.detector = DetectorKind::Exhaustive;
  s.mode = ConstellationMode::RedrawPerUse;
  s.fec = FecSpec{4, 15, dimension};
  s.batchSize = 500;
  s.workers = 1;
  s.seed = 23;
  return s;
}

TEST(CodedSweep, NoiselessFramesDecode) {
  auto s = codedSpec(11);
  s.ebN0Grid = {kInf};
  s.stopping.maxTrials = 500;
  const auto pt = runCodedSweep(s).front();
  EXPECT_EQ(pt.frames, 500u);
  EXPECT_EQ(pt.trials, 500u * 15u);
  EXPECT_EQ(pt.frameErrors, 0u);
  EXPECT_EQ(pt.fer, 0.0);
}

TEST(CodedSweep, CountsIndependentOfWorkerCount) {
  auto s = codedSpec(11);
  s.ebN0Grid = {4.0, 6.0};
  s.stopping.maxTrials = 1500;
  const auto serial = runCodedSweep(s);
  s.workers = 3;
  const auto parallel = runCodedSweep(s);
  for (std::size_t i = 0; i < serial.size(); ++i) EXPECT_TRUE(sameCounts(serial[i], parallel[i]));
}

// With a fresh constellation every channel use, symbol errors inside a frame
// are independent, so the frame error rate is the binomial tail above t.
TEST(CodedSweep, FrameErrorsFollowBinomialTail) {
  auto s = codedSpec(11);
  s.ebN0Grid = {-1.0, 0.5, 2.0};
  s.stopping.maxTrials = 40000;
  s.stopping.minErrors = 300;
  for (const auto& pt : runCodedSweep(s)) {
    ASSERT_GT(pt.frameErrors, 50u) << pt.ebN0Db;
    const double predicted = oracle::binomialTail(15, 2, pt.ser);
    EXPECT_GT(pt.fer, predicted / 2.0) << pt.ebN0Db;
    EXPECT_LT(pt.fer, predicted * 2.0) << pt.ebN0Db;
    const double tolerance = 0.05 + 3.0 / std::sqrt(static_cast<double>(pt.frameErrors));
    EXPECT_NEAR(pt.fer / predicted, 1.0, tolerance) << pt.ebN0Db;
  }
}

TEST(CodedSweep, DecodingRemovesMostSymbolErrors) {
  auto s = codedSpec(11);
  s.ebN0Grid = {8.0};
  s.stopping.maxTrials = 4000;
  const auto pt = runCodedSweep(s).front();
  EXPECT_GT(pt.symbolErrors, 0u);
  EXPECT_LT(pt.decodedSymbolErrors * 5, pt.symbolErrors);
  EXPECT_LE(pt.frameErrors, pt.frames);
}

TEST(AgreementSweep, SingleUnitAlwaysAgrees) {
  auto s = smallSpec();
  s.numUnits = 1;
  s.bitsPerUnit = 5;
  s.detector = DetectorKind::Layered;
  s.layered = DetectorConfig::plain(1);
  s.stopping.maxTrials = 500;
  for (const auto& p : runAgreementSweep(s)) {
    EXPECT_EQ(p.trials, 500u);
    EXPECT_EQ(p.agreements, 500u);
    EXPECT_EQ(p.rate, 1.0);
  }
}

TEST(AgreementSweep, NarrowBeamSometimesDisagrees) {
  auto s = smallSpec();
  s.numUnits = 3;
  s.detector = DetectorKind::Layered;
  s.layered = DetectorConfig::plain(3);
  s.stopping.maxTrials = 2000;
  s.ebN0Grid = {0.0};
  const auto p = runAgreementSweep(s).front();
  EXPECT_LT(p.agreements, p.trials);
  EXPECT_GT(p.rate, 0.1);
  EXPECT_LE(p.ci.low, p.rate);
  EXPECT_GE(p.ci.high, p.rate);
  s.workers = 3;
  EXPECT_EQ(runAgreementSweep(s).front().agreements, p.agreements);
}

}  // namespace
}  // namespace mbm
