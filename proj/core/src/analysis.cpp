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

#include "mbm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mbm {
namespace {

void checkParams(const ErrorModelParams& p) {
  if (!(p.snr >= 0.0)) throw std::invalid_argument("snr must be >= 0");
  if (p.dims < 1) throw std::invalid_argument("K must be >= 1");
  if (p.delta < 1) throw std::invalid_argument("delta must be >= 1");
  if (p.t < 0) throw std::invalid_argument("t must be >= 0");
}

double singlePositionStable(double snr, int dims) {
  const double oneMinusMuSq = 2.0 / (2.0 + snr);
  const double mu = std::sqrt(snr / (2.0 + snr));
  const double oneMinusMu = oneMinusMuSq / (1.0 + mu);
  const double lower = oneMinusMu / 2.0;
  const double upper = (1.0 + mu) / 2.0;
  // sum_{k<K} C(K-1+k, k) upper^k with the ratio C(K+k, k+1)/C(K-1+k, k) = (K+k)/(k+1)
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k + 1 < dims; ++k) {
    term *= upper * static_cast<double>(dims + k) / static_cast<double>(k + 1);
    sum += term;
  }
  return std::pow(lower, dims) * sum;
}

double singlePositionBracket(double snr, int dims) {
  const double mu = std::sqrt(snr / (2.0 + snr));
  const double x = (1.0 - mu * mu) / 4.0;
  // C(2k+2, k+1) / C(2k, k) = (2k+1)(2k+2) / (k+1)^2
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k + 1 < dims; ++k) {
    term *= x * static_cast<double>((2 * k + 1) * (2 * k + 2)) /
            static_cast<double>((k + 1) * (k + 1));
    sum += term;
  }
  return 0.5 * (1.0 - mu * sum);
}

}  // namespace

double qFunction(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double pairwiseErrorClosedForm(const ErrorModelParams& p) {
  checkParams(p);
  return std::pow(singlePositionStable(p.snr, p.dims), p.delta);
}

double pairwiseErrorBracketForm(const ErrorModelParams& p) {
  checkParams(p);
  return std::pow(singlePositionBracket(p.snr, p.dims), p.delta);
}

double pairwiseErrorAsymptotic(const ErrorModelParams& p) {
  checkParams(p);
  if (p.snr <= 0.0) throw std::invalid_argument("asymptotic form needs snr > 0");
  return std::pow(1.0 / (2.0 * p.snr), p.delta);
}

double codedErrorApprox(const ErrorModelParams& p) {
  checkParams(p);
  if (p.snr <= 0.0) throw std::invalid_argument("asymptotic form needs snr > 0");
  return std::pow(1.0 / (2.0 * p.snr), p.t + 1);
}

double codedErrorFiniteSum(const ErrorModelParams& p, int dimension) {
  checkParams(p);
  if (dimension <= p.t) throw std::invalid_argument("code dimension must exceed t");
  const double single = singlePositionStable(p.snr, p.dims);
  double sum = 0.0;
  for (int delta = p.t + 1; delta <= dimension; ++delta) sum += std::pow(single, delta);
  return sum;
}

MutualInformationEstimate mutualInformationMC(std::span<const ComplexVector> points, double snr,
                                              int samples, std::uint64_t seed) {
  if (points.size() < 2) throw std::invalid_argument("need at least two points");
  if (!(snr > 0.0)) throw std::invalid_argument("snr must be > 0");
  if (samples < 2) throw std::invalid_argument("need at least two samples");
  const auto dims = points.front().size();
  for (const auto& x : points) {
    if (x.size() != dims) throw std::invalid_argument("points must share one dimension");
  }

  const double n0 = 1.0 / snr;
  const auto count = points.size();
  const double log2M = std::log2(static_cast<double>(count));
  Rng rng = makeRng(seed, Stream::MutualInformation);
  ComplexGaussian gauss(n0);

  std::vector<double> exponents(count);
  ComplexVector z(dims);
  double mean = 0.0;
  double m2 = 0.0;
  for (int s = 0; s < samples; ++s) {
    const auto& x = points[static_cast<std::size_t>(s) % count];
    for (Eigen::Index k = 0; k < dims; ++k) z[k] = gauss(rng);
    const double zNorm = z.squaredNorm();
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < count; ++j) {
      exponents[j] = (zNorm - (x - points[j] + z).squaredNorm()) / n0;
      peak = std::max(peak, exponents[j]);
    }
    double acc = 0.0;
    for (double e : exponents) acc += std::exp(e - peak);
    const double value = log2M - (peak + std::log(acc)) / std::log(2.0);
    if (!std::isfinite(value)) throw std::runtime_error("non-finite mutual-information sample");
    // Welford update
    const double delta = value - mean;
    mean += delta / (s + 1);
    m2 += delta * (value - mean);
  }
  const double variance = m2 / (samples - 1);
  return {mean, std::sqrt(variance / samples)};
}

std::vector<ComplexVector> qamConstellation(int order) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
  if (order < 4 || side * side != order) throw std::invalid_argument("QAM order must be a square");
  // Average energy of the unnormalized grid {+-1, +-3, ...}^2 is 2 (side^2 - 1) / 3.
  const double scale = 1.0 / std::sqrt(2.0 * (side * side - 1) / 3.0);
  std::vector<ComplexVector> out;
  out.reserve(order);
  for (int i = 0; i < side; ++i) {
    for (int q = 0; q < side; ++q) {
      ComplexVector v(1);
      v[0] = Complex{(2.0 * i - side + 1) * scale, (2.0 * q - side + 1) * scale};
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::vector<ComplexVector> randomGaussianPoints(int count, int dims, std::uint64_t seed) {
  if (count < 1 || dims < 1) throw std::invalid_argument("count and dims must be positive");
  Rng rng = makeRng(seed, Stream::Constellation);
  ComplexGaussian gauss(1.0);
  std::vector<ComplexVector> out(count, ComplexVector(dims));
  for (auto& v : out) {
    for (int k = 0; k < dims; ++k) v[k] = gauss(rng);
  }
  return out;
}

}  // namespace mbm
