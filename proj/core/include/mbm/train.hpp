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
#include <vector>

#include <Eigen/Dense>

#include "mbm/model.hpp"

namespace mbm {

/// How the receiver isolates one unit while scanning its constituents.
enum class TrainingScheme {
  /// Other units transmit their index-0 constituent; the sum of those
  /// defaults is learned first over a Hadamard pilot pattern and subtracted.
  HadamardDefaults,
  /// Other units are switched off; each constituent is observed directly.
  Bypass,
};

/// Smallest power of two >= numUnits.
int hadamardOrder(int numUnits);

/// Sylvester Hadamard matrix of the given power-of-two order (+-1 entries).
Eigen::MatrixXd hadamardMatrix(int order);

/// Learns every unit's index-0 constituent from hadamardOrder(N) pilot slots,
/// each repeated `reps` times. In slot s unit n sends its default times
/// H(s, n); padded columns are silent. Inverting with H^T / order leaves
/// per-component noise variance pilotN0 / (order * reps).
std::vector<ComplexVector> estimateDefaultsHadamard(const LayeredConstellation& truth,
                                                    double pilotN0, std::uint64_t seed,
                                                    int reps = 1);

/// Per-unit training with pilot noise pilotN0 per complex dimension and
/// `reps` averaged observations per constituent. Pilots use unit energy and
/// SBM weight +1.
LayeredConstellation trainPerUnit(const LayeredConstellation& truth, double pilotN0, int reps,
                                  std::uint64_t seed,
                                  TrainingScheme scheme = TrainingScheme::HadamardDefaults);

/// N 2^R_n reps scanning pilots, plus hadamardOrder(N) reps default pilots
/// for the Hadamard scheme.
std::uint64_t pilotCount(int numUnits, int bitsPerUnit, int reps,
                         TrainingScheme scheme = TrainingScheme::HadamardDefaults);

}  // namespace mbm
