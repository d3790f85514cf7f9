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

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace mbm {

/// Named random streams. Every randomized quantity in a run draws from a
/// generator keyed by (master seed, stream, counters), so changing how work
/// is split across threads never changes which numbers a trial sees.
enum class Stream : std::uint64_t {
  Constellation = 0x1001,
  Message = 0x1002,
  Noise = 0x1003,
  Trial = 0x1004,
  Training = 0x1005,
  Permutation = 0x1006,
  MutualInformation = 0x1007,
};

using Rng = std::mt19937_64;

/// SplitMix64-style mix of the key tuple into a 64-bit seed.
std::uint64_t deriveSeed(std::uint64_t master, Stream stream, std::uint64_t a = 0,
                         std::uint64_t b = 0) noexcept;

inline Rng makeRng(std::uint64_t master, Stream stream, std::uint64_t a = 0,
                   std::uint64_t b = 0) {
  return Rng(deriveSeed(master, stream, a, b));
}

/// Circularly-symmetric complex Gaussian with E|x|^2 = variance.
class ComplexGaussian {
 public:
  explicit ComplexGaussian(double variance = 1.0)
      : normal_(0.0, std::sqrt(variance / 2.0)) {}

  std::complex<double> operator()(Rng& rng) {
    const double re = normal_(rng);
    const double im = normal_(rng);
    return {re, im};
  }

 private:
  std::normal_distribution<double> normal_;
};

}  // namespace mbm
