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
#include <span>
#include <vector>

#include "mbm/model.hpp"

namespace mbm {

/// Gaussian tail probability, 0.5 * erfc(x / sqrt(2)).
double qFunction(double x);

struct ErrorModelParams {
  double snr = 1.0;  ///< linear Es/N0
  int dims = 1;      ///< K receive dimensions
  int delta = 1;     ///< number of independent symbol-error positions
  int t = 0;         ///< FEC correction capability
};

/// Probability that Delta independent positions all decode to a wrong
/// Gaussian-random neighbour. With mu = sqrt(snr / (2 + snr)) the
/// single-position term is
///   1/2 [1 - mu sum_{k<K} C(2k,k) ((1 - mu^2)/4)^k]
/// which is evaluated through the equivalent all-positive sum
///   ((1-mu)/2)^K sum_{k<K} C(K-1+k, k) ((1+mu)/2)^k
/// so that it stays accurate when the bracket cancels at high SNR.
double pairwiseErrorClosedForm(const ErrorModelParams& p);

/// The bracketed C(2k,k) form evaluated literally. Loses relative accuracy
/// once the result drops below ~1e-12; kept as a second algebraic route.
double pairwiseErrorBracketForm(const ErrorModelParams& p);

/// (1 / (2 snr))^Delta.
double pairwiseErrorAsymptotic(const ErrorModelParams& p);

/// (1 / (2 snr))^(t+1).
double codedErrorApprox(const ErrorModelParams& p);

/// sum_{Delta=t+1}^{dimension} pairwiseErrorClosedForm(Delta).
double codedErrorFiniteSum(const ErrorModelParams& p, int dimension);

struct MutualInformationEstimate {
  double bitsPerUse = 0.0;
  double standardError = 0.0;
};

/// Monte Carlo estimate of I(X;Y) for equiprobable inputs over AWGN with
/// Es = 1 per point and N0 = 1/snr:
///   log2 M - E[log2 sum_x' exp((|z|^2 - |x - x' + z|^2) / N0)].
/// Samples cycle through the input points in order with fresh noise each.
MutualInformationEstimate mutualInformationMC(std::span<const ComplexVector> points, double snr,
                                              int samples, std::uint64_t seed);

/// Square M-QAM normalized to unit average energy (M a power of 4).
std::vector<ComplexVector> qamConstellation(int order);

/// `count` i.i.d. CN(0, I_K) points.
std::vector<ComplexVector> randomGaussianPoints(int count, int dims, std::uint64_t seed);

}  // namespace mbm
