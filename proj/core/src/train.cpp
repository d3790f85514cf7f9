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

#include "mbm/train.hpp"

#include <stdexcept>

namespace mbm {
namespace {

ComplexVector averagedObservation(const ComplexVector& clean, double pilotN0, int reps,
                                  ComplexGaussian& gauss, Rng& rng) {
  if (pilotN0 == 0.0) return clean;
  ComplexVector acc = ComplexVector::Zero(clean.size());
  for (int rep = 0; rep < reps; ++rep) {
    for (Eigen::Index k = 0; k < clean.size(); ++k) acc[k] += clean[k] + gauss(rng);
  }
  return acc / static_cast<double>(reps);
}

void checkArgs(double pilotN0, int reps) {
  if (pilotN0 < 0.0) throw std::invalid_argument("pilot N0 must be >= 0");
  if (reps < 1) throw std::invalid_argument("training repetitions must be >= 1");
}

}  // namespace

int hadamardOrder(int numUnits) {
  if (numUnits < 1) throw std::invalid_argument("numUnits must be positive");
  int order = 1;
  while (order < numUnits) order *= 2;
  return order;
}

Eigen::MatrixXd hadamardMatrix(int order) {
  if (order < 1 || (order & (order - 1)) != 0) {
    throw std::invalid_argument("Hadamard order must be a power of two");
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Ones(1, 1);
  while (h.rows() < order) {
    const auto n = h.rows();
    Eigen::MatrixXd next(2 * n, 2 * n);
    next << h, h, h, -h;
    h = std::move(next);
  }
  return h;
}

std::vector<ComplexVector> estimateDefaultsHadamard(const LayeredConstellation& truth,
                                                    double pilotN0, std::uint64_t seed,
                                                    int reps) {
  checkArgs(pilotN0, reps);
  const int numUnits = truth.numUnits();
  const int order = hadamardOrder(numUnits);
  const Eigen::MatrixXd h = hadamardMatrix(order);
  const auto dims = truth.receiveDims();

  Rng rng = makeRng(seed, Stream::Training, 0);
  ComplexGaussian gauss(pilotN0);
  std::vector<ComplexVector> slots;
  slots.reserve(order);
  for (int s = 0; s < order; ++s) {
    ComplexVector clean = ComplexVector::Zero(dims);
    for (int n = 0; n < numUnits; ++n) clean += h(s, n) * truth.constituent(n, 0);
    slots.push_back(averagedObservation(clean, pilotN0, reps, gauss, rng));
  }

  std::vector<ComplexVector> defaults;
  defaults.reserve(numUnits);
  for (int n = 0; n < numUnits; ++n) {
    ComplexVector d = ComplexVector::Zero(dims);
    for (int s = 0; s < order; ++s) d += h(s, n) * slots[s];
    defaults.push_back(d / static_cast<double>(order));
  }
  return defaults;
}

LayeredConstellation trainPerUnit(const LayeredConstellation& truth, double pilotN0, int reps,
                                  std::uint64_t seed, TrainingScheme scheme) {
  checkArgs(pilotN0, reps);
  const int numUnits = truth.numUnits();
  const auto dims = truth.receiveDims();

  std::vector<ComplexVector> defaults;
  if (scheme == TrainingScheme::HadamardDefaults) {
    defaults = estimateDefaultsHadamard(truth, pilotN0, seed, reps);
  }

  Rng rng = makeRng(seed, Stream::Training, 1);
  ComplexGaussian gauss(pilotN0);
  std::vector<Eigen::MatrixXcd> tables;
  tables.reserve(numUnits);
  for (int n = 0; n < numUnits; ++n) {
    ComplexVector background = ComplexVector::Zero(dims);
    ComplexVector backgroundEstimate = ComplexVector::Zero(dims);
    if (scheme == TrainingScheme::HadamardDefaults) {
      for (int j = 0; j < numUnits; ++j) {
        if (j == n) continue;
        background += truth.constituent(j, 0);
        backgroundEstimate += defaults[j];
      }
    }
    Eigen::MatrixXcd t(dims, truth.tableSize());
    for (int m = 0; m < truth.tableSize(); ++m) {
      const ComplexVector clean = truth.constituent(n, static_cast<std::uint32_t>(m)) + background;
      t.col(m) = averagedObservation(clean, pilotN0, reps, gauss, rng) - backgroundEstimate;
    }
    tables.push_back(std::move(t));
  }
  return LayeredConstellation(std::move(tables));
}

std::uint64_t pilotCount(int numUnits, int bitsPerUnit, int reps, TrainingScheme scheme) {
  if (numUnits < 1 || bitsPerUnit < 0 || reps < 1) throw std::invalid_argument("bad pilot shape");
  std::uint64_t count = static_cast<std::uint64_t>(numUnits) * (std::uint64_t{1} << bitsPerUnit) *
                        static_cast<std::uint64_t>(reps);
  if (scheme == TrainingScheme::HadamardDefaults) {
    count += static_cast<std::uint64_t>(hadamardOrder(numUnits)) * static_cast<std::uint64_t>(reps);
  }
  return count;
}

}  // namespace mbm
