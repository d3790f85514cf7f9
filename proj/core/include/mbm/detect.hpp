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
#include <vector>

#include <Eigen/Dense>

#include "mbm/model.hpp"

namespace mbm {

inline constexpr std::uint64_t kDefaultExhaustiveCap = std::uint64_t{1} << 24;

enum class TieBreak {
  /// Equal distances resolve to the lexicographically smallest message,
  /// i.e. the lowest constituent index within a single argmin.
  LowestIndex,
};

struct DetectorConfig {
  int iterations = 2;   ///< T
  int beamWidth = 1;    ///< P
  /// Unit orderings, each a permutation of 0..N-1. One greedy run per entry.
  std::vector<std::vector<int>> permutations;
  TieBreak tieBreak = TieBreak::LowestIndex;
  /// Stop as soon as the best candidate is closer than this. 0 disables.
  double earlyExitDistance = 0.0;

  /// Single identity ordering, P = 1: the plain greedy iteration.
  static DetectorConfig plain(int numUnits, int iterations = 1);
  /// At most `maxPermutations` orderings, identity first. For N <= 4 they are
  /// evenly spaced through the lexicographic list of all N! (all of them when
  /// N! <= maxPermutations); otherwise distinct orderings drawn from `seed`.
  static DetectorConfig standard(int numUnits, int iterations, int beamWidth,
                                 int maxPermutations = 24, std::uint64_t seed = 0);

  void validate(int numUnits) const;
};

std::vector<std::vector<int>> allPermutations(int numUnits);

struct DetectionResult {
  MessageVector message;
  double distanceSquared = 0.0;        ///< ||r - c(message)||^2
  std::uint64_t candidatesExamined = 0;
};

/// Minimum-distance search over all M points. Ties go to the smallest
/// integer encoding. Throws std::length_error above `cap` points.
DetectionResult detectExhaustive(const ComplexVector& r, const LayeredConstellation& c,
                                 std::uint64_t cap = kDefaultExhaustiveCap);

/// Snapshot emitted after every greedy step.
struct StepTrace {
  int permutation = 0;
  int iteration = 0;
  int step = 0;
  int unit = 0;
  int beamSize = 0;
  double bestDistance = 0.0;  ///< best beam entry, direct distance
  bool complete = false;      ///< every unit of the best entry assigned
};

using StepObserver = std::function<void(const StepTrace&)>;

/// Greedy layered search with a P-wide beam and permutation restarts.
///
/// Each run starts from the all-zero estimate. A step for unit u replaces
/// u's constituent in every beam entry by each of the 2^R_n candidates and
/// keeps the P best distinct messages. Beam entries that agree everywhere
/// except u expand to the same candidate set and are processed once, so no
/// message is ever duplicated in the beam. The beam carries across
/// iterations. The answer is the best survivor over all runs.
///
/// Holds scratch buffers, so one instance per thread.
class LayeredDetector {
 public:
  explicit LayeredDetector(DetectorConfig config);

  const DetectorConfig& config() const { return config_; }

  DetectionResult detect(const ComplexVector& r, const LayeredConstellation& c,
                         const StepObserver& observer = {});

 private:
  struct Beam {
    int size = 0;
    std::vector<std::int32_t> assign;  // numUnits x size, column per entry
    std::vector<double> dist;
  };

  double directDistance(const Eigen::VectorXd& stackedR, const LayeredConstellation& c,
                        const std::int32_t* assign) const;
  void runStep(const Eigen::VectorXd& stackedR, const LayeredConstellation& c, int unit);

  DetectorConfig config_;
  Beam beam_, next_;
  Eigen::MatrixXd residuals_;
  Eigen::VectorXd residualNorms_;
  Eigen::MatrixXd scores_;
  std::vector<int> groupRep_;
  std::vector<int> order_;
  std::uint64_t examined_ = 0;
};

DetectionResult detectLayered(const ComplexVector& r, const LayeredConstellation& c,
                              const DetectorConfig& config);

/// Fraction of `trials` noisy transmissions where the layered detector's
/// answer matches exhaustive search. A layered answer at the same distance
/// as the exhaustive one (within 1e-9 relative) counts as agreement.
double agreementRate(const LayeredConstellation& c, const ChannelParams& params,
                     const DetectorConfig& config, int trials, std::uint64_t seed);

}  // namespace mbm
