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

#include <cmath>

#include <gtest/gtest.h>

#include "mbm/train.hpp"

namespace mbm {
namespace {

double maxAbsDiff(const LayeredConstellation& a, const LayeredConstellation& b) {
  double worst = 0.0;
  for (int n = 0; n < a.numUnits(); ++n) worst = std::max(worst, (a.table(n) - b.table(n)).cwiseAbs().maxCoeff());
  return worst;
}

double meanSquaredError(const LayeredConstellation& a, const LayeredConstellation& b) {
  double sum = 0.0;
  double count = 0.0;
  for (int n = 0; n < a.numUnits(); ++n) {
    sum += (a.table(n) - b.table(n)).squaredNorm();
    count += static_cast<double>(a.table(n).size());
  }
  return sum / count;
}

TEST(Hadamard, OrderAndOrthogonality) {
  EXPECT_EQ(hadamardOrder(1), 1);
  EXPECT_EQ(hadamardOrder(3), 4);
  EXPECT_EQ(hadamardOrder(4), 4);
  EXPECT_EQ(hadamardOrder(5), 8);
  for (int order : {1, 2, 4, 8, 16}) {
    const Eigen::MatrixXd h = hadamardMatrix(order);
    EXPECT_TRUE((h.transpose() * h).isApprox(order * Eigen::MatrixXd::Identity(order, order)));
    EXPECT_EQ(h.cwiseAbs().minCoeff(), 1.0);
  }
  EXPECT_THROW(hadamardMatrix(6), std::invalid_argument);
}

TEST(EstimateDefaults, NoiselessRecoveryIsExact) {
  for (int units : {1, 3, 4}) {
    const auto truth = generateConstellation(units, 3, 5, 10 + units);
    const auto defaults = estimateDefaultsHadamard(truth, 0.0, 1);
    ASSERT_EQ(defaults.size(), static_cast<std::size_t>(units));
    for (int n = 0; n < units; ++n) {
      EXPECT_LT((defaults[n] - truth.table(n).col(0)).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(EstimateDefaults, SingleUnitIsDirectObservation) {
  const auto truth = generateConstellation(1, 2, 2000, 3);
  const auto defaults = estimateDefaultsHadamard(truth, 0.5, 3);
  const double variance = (defaults[0] - truth.table(0).col(0)).squaredNorm() / 2000.0;
  EXPECT_NEAR(variance, 0.5, 0.05);
}

TEST(EstimateDefaults, HadamardAveragingGain) {
  const int dims = 4000;
  const double pilotN0 = 0.8;
  for (int units : {2, 3, 4}) {
    const auto truth = generateConstellation(units, 1, dims, 40 + units);
    const auto defaults = estimateDefaultsHadamard(truth, pilotN0, 41);
    const double expected = pilotN0 / hadamardOrder(units);
    for (int n = 0; n < units; ++n) {
      const double variance = (defaults[n] - truth.table(n).col(0)).squaredNorm() / dims;
      EXPECT_NEAR(variance, expected, 0.1 * expected) << "N=" << units << " unit " << n;
    }
  }
}

TEST(TrainPerUnit, NoiselessPilotsRecoverTheConstellation) {
  const auto truth = generateConstellation(4, 3, 6, 21);
  for (auto scheme : {TrainingScheme::HadamardDefaults, TrainingScheme::Bypass}) {
    const auto est = trainPerUnit(truth, 0.0, 1, 5, scheme);
    EXPECT_LT(maxAbsDiff(est, truth), 1e-12);
  }
  EXPECT_TRUE(trainPerUnit(truth, 0.0, 1, 5, TrainingScheme::Bypass) == truth);
}

TEST(TrainPerUnit, ErrorHalvesWithRepetitions) {
  const auto truth = generateConstellation(4, 5, 256, 22);
  const double pilotN0 = 0.2;
  std::vector<double> mse;
  for (int reps : {1, 2, 4, 8}) {
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      sum += meanSquaredError(trainPerUnit(truth, pilotN0, reps, seed), truth);
    }
    mse.push_back(sum / 4.0);
  }
  for (std::size_t i = 1; i < mse.size(); ++i) EXPECT_NEAR(mse[i - 1] / mse[i], 2.0, 0.2);
  // scanning noise plus N - 1 subtracted default estimates, each pilotN0 / N'
  const double c = 1.0 + 3.0 / hadamardOrder(4);
  for (std::size_t i = 0; i < mse.size(); ++i) {
    EXPECT_NEAR(mse[i] * (1 << i) / pilotN0, c, 0.05 * c);
  }
}

TEST(TrainPerUnit, BypassCarriesOnlyScanningNoise) {
  const auto truth = generateConstellation(3, 5, 16, 23);
  const double mse = meanSquaredError(trainPerUnit(truth, 0.3, 1, 7, TrainingScheme::Bypass), truth);
  EXPECT_NEAR(mse / 0.3, 1.0, 0.07);
}

TEST(TrainPerUnit, SeededAndValidated) {
  const auto truth = generateConstellation(2, 3, 4, 24);
  EXPECT_TRUE(trainPerUnit(truth, 0.1, 2, 9) == trainPerUnit(truth, 0.1, 2, 9));
  EXPECT_FALSE(trainPerUnit(truth, 0.1, 2, 9) == trainPerUnit(truth, 0.1, 2, 10));
  EXPECT_THROW(trainPerUnit(truth, -0.1, 1, 9), std::invalid_argument);
  EXPECT_THROW(trainPerUnit(truth, 0.1, 0, 9), std::invalid_argument);
}

TEST(PilotCount, LinearInUnitsNotExponentialInRate) {
  EXPECT_EQ(pilotCount(4, 8, 1), 1028u);
  EXPECT_EQ(pilotCount(4, 8, 1, TrainingScheme::Bypass), 1024u);
  EXPECT_EQ(pilotCount(3, 4, 2), 2u * (3 * 16 + 4));
  EXPECT_LT(pilotCount(4, 8, 1), std::uint64_t{1} << 32);
}

}  // namespace
}  // namespace mbm
