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

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "mbm/detect.hpp"

namespace mbm {
namespace {

ComplexVector noisy(const LayeredConstellation& c, const MessageVector& m, double n0, Rng& rng) {
  return transmit(mapToPoint(c, m), ChannelParams{n0, 1.0, 1}, rng);
}

double distanceTo(const ComplexVector& r, const LayeredConstellation& c, const MessageVector& m) {
  return (r - mapToPoint(c, m)).squaredNorm();
}

TEST(DetectorConfig, PlainIsSingleIdentityRun) {
  const auto cfg = DetectorConfig::plain(3);
  EXPECT_EQ(cfg.beamWidth, 1);
  EXPECT_EQ(cfg.iterations, 1);
  ASSERT_EQ(cfg.permutations.size(), 1u);
  EXPECT_EQ(cfg.permutations[0], (std::vector<int>{0, 1, 2}));
}

TEST(DetectorConfig, StandardUsesAllOrderingsForFourUnits) {
  const auto cfg = DetectorConfig::standard(4, 2, 128);
  EXPECT_EQ(cfg.permutations.size(), 24u);
  std::set<std::vector<int>> unique(cfg.permutations.begin(), cfg.permutations.end());
  EXPECT_EQ(unique.size(), 24u);
}

TEST(DetectorConfig, TruncatedOrderingsAreSpreadOut) {
  const auto cfg = DetectorConfig::standard(4, 2, 32, 6);
  ASSERT_EQ(cfg.permutations.size(), 6u);
  EXPECT_EQ(cfg.permutations[0], (std::vector<int>{0, 1, 2, 3}));
  std::set<int> leaders;
  for (const auto& p : cfg.permutations) leaders.insert(p[0]);
  EXPECT_GE(leaders.size(), 3u);
}

TEST(DetectorConfig, LargeNDrawsDistinctOrderingsFromSeed) {
  const auto a = DetectorConfig::standard(6, 2, 4, 10, 3);
  const auto b = DetectorConfig::standard(6, 2, 4, 10, 3);
  EXPECT_EQ(a.permutations, b.permutations);
  ASSERT_EQ(a.permutations.size(), 10u);
  EXPECT_EQ(a.permutations[0], (std::vector<int>{0, 1, 2, 3, 4, 5}));
  std::set<std::vector<int>> unique(a.permutations.begin(), a.permutations.end());
  EXPECT_EQ(unique.size(), 10u);
  EXPECT_NO_THROW(a.validate(6));
}

TEST(DetectorConfig, ValidateRejectsBadOrderings) {
  DetectorConfig cfg = DetectorConfig::plain(3);
  cfg.permutations = {{0, 1, 1}};
  EXPECT_THROW(cfg.validate(3), std::invalid_argument);
  cfg.permutations = {{0, 1}};
  EXPECT_THROW(cfg.validate(3), std::invalid_argument);
  cfg.permutations = {};
  EXPECT_THROW(cfg.validate(3), std::invalid_argument);
  cfg = DetectorConfig::plain(3);
  cfg.beamWidth = 0;
  EXPECT_THROW(cfg.validate(3), std::invalid_argument);
  cfg.beamWidth = 1;
  cfg.iterations = 0;
  EXPECT_THROW(cfg.validate(3), std::invalid_argument);
}

TEST(DetectExhaustive, NoiselessInputIsRecovered) {
  const auto c = generateConstellation(2, 4, 4, 1);
  for (std::uint64_t code : {0u, 17u, 255u}) {
    const auto m = MessageVector::decode(code, 2, 4);
    const auto res = detectExhaustive(mapToPoint(c, m), c);
    EXPECT_EQ(res.message, m);
    EXPECT_NEAR(res.distanceSquared, 0.0, 1e-24);
    EXPECT_EQ(res.candidatesExamined, 256u);
  }
}

TEST(DetectExhaustive, FourPamExample) {
  ComplexVector lo(1), hi(1), r(1);
  lo[0] = 0.5;
  hi[0] = 1.5;
  const std::vector<Complex> bpsk{1.0, -1.0};
  const auto c = withSbmWeights(constellationFromTable({{lo, hi}}), bpsk);
  r[0] = 0.6;
  const auto res = detectExhaustive(r, c);
  EXPECT_DOUBLE_EQ(mapToPoint(c, res.message)[0].real(), 0.5);
  EXPECT_NEAR(res.distanceSquared, 0.01, 1e-15);
}

TEST(DetectExhaustive, MatchesIndependentLinearScan) {
  for (int instance = 0; instance < 1000; ++instance) {
    const auto c = generateConstellation(2, 4, 3, 1000 + instance);
    Rng rng = makeRng(instance, Stream::Noise);
    ComplexGaussian g(2.0);
    ComplexVector r(3);
    for (int k = 0; k < 3; ++k) r[k] = g(rng);
    const auto [code, dist] = oracle::bruteForceNearest(r, c);
    const auto res = detectExhaustive(r, c);
    ASSERT_EQ(res.message.encode(4), code) << "instance " << instance;
    EXPECT_NEAR(res.distanceSquared, dist, 1e-12 * (1.0 + dist));
  }
}

TEST(DetectExhaustive, TiesGoToSmallestEncoding) {
  ComplexVector a(1), b(1);
  a[0] = 1.0;
  b[0] = -1.0;
  // points 0 and 3 coincide at 0; 1 at 2, 2 at -2
  const auto c = constellationFromTable({{a, b}, {b, a}});
  ComplexVector r(1);
  r[0] = 0.0;
  EXPECT_EQ(detectExhaustive(r, c).message.encode(1), 0u);
}

TEST(DetectExhaustive, RefusesAboveCap) {
  const auto c = generateConstellation(2, 8, 2, 1);
  ComplexVector r = ComplexVector::Zero(2);
  EXPECT_THROW(detectExhaustive(r, c, 1u << 15), std::length_error);
  EXPECT_NO_THROW(detectExhaustive(r, c, 1u << 16));
}

TEST(DetectLayered, SingleUnitIsAFullSearch) {
  const auto c = generateConstellation(1, 6, 4, 3);
  Rng rng = makeRng(3, Stream::Noise);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = randomMessage(c, rng);
    const auto r = noisy(c, m, 2.0, rng);
    const auto full = detectExhaustive(r, c);
    for (int p : {1, 3, 64}) {
      for (int t : {1, 2}) {
        const auto res = detectLayered(r, c, DetectorConfig::standard(1, t, p));
        EXPECT_EQ(res.message, full.message);
        EXPECT_DOUBLE_EQ(res.distanceSquared, full.distanceSquared);
      }
    }
  }
}

int noiselessRecoveries(int beamWidth, int trials) {
  const auto cfg = DetectorConfig::standard(2, 2, beamWidth);
  int correct = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const auto c = generateConstellation(2, 4, 4, 5000 + trial);
    Rng rng = makeRng(trial, Stream::Message);
    const auto m = randomMessage(c, rng);
    const auto r = mapToPoint(c, m);
    const auto res = detectLayered(r, c, cfg);
    if (res.message == m) {
      ++correct;
    } else {
      // a local minimum of the greedy search, never below the global one
      EXPECT_GE(res.distanceSquared, detectExhaustive(r, c).distanceSquared);
    }
  }
  return correct;
}

// Measured over 10^4 inputs: P = 4 misses 44 (genuine local minima, no
// ties, unchanged for T up to 8), P = 8 misses 1, P = 16 misses none.
TEST(DetectLayered, NoiselessTwoUnitRecovery) {
  EXPECT_GE(noiselessRecoveries(4, 1000), 990);
  EXPECT_GE(noiselessRecoveries(8, 1000), 999);
  EXPECT_EQ(noiselessRecoveries(16, 1000), 1000);
}

TEST(DetectLayered, ReportedDistanceMatchesMessage) {
  const auto c = generateConstellation(3, 4, 6, 9);
  Rng rng = makeRng(9, Stream::Noise);
  LayeredDetector det(DetectorConfig::standard(3, 2, 8));
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = randomMessage(c, rng);
    const auto r = noisy(c, m, 1.0, rng);
    const auto res = det.detect(r, c);
    EXPECT_NEAR(res.distanceSquared, distanceTo(r, c, res.message), 1e-12);
    EXPECT_GT(res.candidatesExamined, 0u);
  }
}

TEST(DetectLayered, FullBeamSubsumesSearch) {
  const auto c = generateConstellation(2, 3, 3, 4);
  DetectorConfig cfg = DetectorConfig::plain(2);
  cfg.beamWidth = 64;
  EXPECT_DOUBLE_EQ(agreementRate(c, ChannelParams{1.0, 1.0, 1}, cfg, 500, 4), 1.0);
}

TEST(DetectLayered, EarlyExitStillReturnsAValidMessage) {
  const auto c = generateConstellation(3, 4, 6, 2);
  auto cfg = DetectorConfig::standard(3, 2, 4);
  cfg.earlyExitDistance = 1e6;
  int steps = 0;
  LayeredDetector det(cfg);
  const auto m = MessageVector{{1, 2, 3}};
  const auto res = det.detect(mapToPoint(c, m), c, [&](const StepTrace&) { ++steps; });
  EXPECT_EQ(steps, 3);
  EXPECT_TRUE(c.isValid(res.message));
}

TEST(AgreementRate, NoiselessSingleUnitAgreesAlways) {
  const auto c = generateConstellation(1, 5, 4, 8);
  EXPECT_DOUBLE_EQ(agreementRate(c, ChannelParams{0.0, 1.0, 1}, DetectorConfig::plain(1), 200, 8),
                   1.0);
}

TEST(AgreementRate, IsDeterministic) {
  const auto c = generateConstellation(2, 4, 4, 6);
  const auto cfg = DetectorConfig::plain(2, 2);
  const ChannelParams params{1.5, 1.0, 1};
  EXPECT_EQ(agreementRate(c, params, cfg, 300, 6), agreementRate(c, params, cfg, 300, 6));
}

// Properties

TEST(DetectProperties, NeverBeatsExhaustive) {
  for (int trial = 0; trial < 500; ++trial) {
    const auto c = generateConstellation(3, 3, 4, 200 + trial);
    Rng rng = makeRng(trial, Stream::Noise);
    const auto m = randomMessage(c, rng);
    const auto r = noisy(c, m, 3.0, rng);
    const auto full = detectExhaustive(r, c);
    const auto res = detectLayered(r, c, DetectorConfig::standard(3, 2, 2));
    EXPECT_GE(res.distanceSquared, full.distanceSquared - 1e-12 * (1.0 + full.distanceSquared));
    if (res.message == full.message) EXPECT_DOUBLE_EQ(res.distanceSquared, full.distanceSquared);
  }
}

TEST(DetectProperties, DescentIsMonotoneOnceComplete) {
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = generateConstellation(4, 4, 5, 300 + trial);
    Rng rng = makeRng(trial, Stream::Noise);
    const auto r = noisy(c, randomMessage(c, rng), 2.0, rng);
    LayeredDetector det(DetectorConfig::standard(4, 3, 1 + trial % 5));
    int lastPerm = -1;
    double previous = 0.0;
    det.detect(r, c, [&](const StepTrace& s) {
      if (!s.complete) return;
      if (s.permutation == lastPerm) {
        EXPECT_LE(s.bestDistance, previous * (1.0 + 1e-12) + 1e-12)
            << "perm " << s.permutation << " iter " << s.iteration << " step " << s.step;
      }
      lastPerm = s.permutation;
      previous = s.bestDistance;
    });
  }
}

TEST(DetectProperties, MorePermutationsNeverHurt) {
  for (int trial = 0; trial < 300; ++trial) {
    const auto c = generateConstellation(4, 3, 4, 400 + trial);
    Rng rng = makeRng(trial, Stream::Noise);
    const auto r = noisy(c, randomMessage(c, rng), 2.5, rng);
    double previous = std::numeric_limits<double>::infinity();
    for (int count : {1, 2, 6, 12, 24}) {
      const auto d = detectLayered(r, c, DetectorConfig::standard(4, 2, 2, count)).distanceSquared;
      EXPECT_LE(d, previous);
      previous = d;
    }
  }
}

// A wider beam keeps every candidate a narrower one keeps at the first step,
// but later steps can diverge, so dominance is not a theorem for beam search.
// It holds on the vast majority of inputs and, on average, strictly.
TEST(DetectProperties, WiderBeamDominatesInAggregate) {
  int worse = 0;
  int better = 0;
  double sumNarrow = 0.0;
  double sumWide = 0.0;
  constexpr int trials = 2000;
  for (int trial = 0; trial < trials; ++trial) {
    const auto c = generateConstellation(4, 3, 4, 700 + trial);
    Rng rng = makeRng(trial, Stream::Noise);
    const auto r = noisy(c, randomMessage(c, rng), 2.5, rng);
    const double narrow = detectLayered(r, c, DetectorConfig::standard(4, 2, 2, 1)).distanceSquared;
    const double wide = detectLayered(r, c, DetectorConfig::standard(4, 2, 8, 1)).distanceSquared;
    worse += wide > narrow * (1.0 + 1e-12);
    better += wide < narrow * (1.0 - 1e-12);
    sumNarrow += narrow;
    sumWide += wide;
  }
  RecordProperty("wider_beam_worse", worse);
  RecordProperty("wider_beam_better", better);
  EXPECT_LE(worse, trials / 100);
  EXPECT_GT(better, 10 * worse);
  EXPECT_LT(sumWide, sumNarrow);
}

TEST(DetectProperties, ResultsIndependentOfThreads) {
  const auto c = generateConstellation(4, 4, 8, 12);
  const auto cfg = DetectorConfig::standard(4, 2, 8);
  std::vector<ComplexVector> inputs;
  Rng rng = makeRng(12, Stream::Noise);
  for (int i = 0; i < 64; ++i) inputs.push_back(noisy(c, randomMessage(c, rng), 2.0, rng));

  std::vector<DetectionResult> serial;
  LayeredDetector det(cfg);
  for (const auto& r : inputs) serial.push_back(det.detect(r, c));

  std::vector<DetectionResult> parallel(inputs.size());
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < 4; ++w) {
      pool.emplace_back([&, w] {
        LayeredDetector local(cfg);
        for (std::size_t i = w; i < inputs.size(); i += 4) parallel[i] = local.detect(inputs[i], c);
      });
    }
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    EXPECT_EQ(parallel[i].message, serial[i].message);
    EXPECT_EQ(parallel[i].distanceSquared, serial[i].distanceSquared);
    EXPECT_EQ(parallel[i].candidatesExamined, serial[i].candidatesExamined);
  }
}

}  // namespace
}  // namespace mbm
