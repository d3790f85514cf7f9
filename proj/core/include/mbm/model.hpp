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

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mbm/rng.hpp"

namespace mbm {

using Complex = std::complex<double>;

/// A K-dimensional complex vector: constituent vectors, constellation
/// points, noise and received signals all use this type.
using ComplexVector = Eigen::VectorXcd;

inline double squaredNorm(const ComplexVector& v) { return v.squaredNorm(); }

/// Per-unit constituent indices (m_1, ..., m_N), each in [0, 2^R_n).
struct MessageVector {
  std::vector<std::uint32_t> indices;

  std::size_t size() const { return indices.size(); }

  /// Big-endian packing: unit 0 occupies the most significant bits.
  std::uint64_t encode(int bitsPerUnit) const;
  static MessageVector decode(std::uint64_t value, int numUnits, int bitsPerUnit);

  friend bool operator==(const MessageVector&, const MessageVector&) = default;
  friend auto operator<=>(const MessageVector&, const MessageVector&) = default;
};

/// Unit-modulus SBM weights s_n, one per transmit unit.
struct SbmSymbolVector {
  std::vector<Complex> weights;

  static SbmSymbolVector allOnes(int numUnits);
  void validate(int numUnits) const;
};

struct ChannelParams {
  double n0 = 1.0;              ///< noise energy per complex dimension
  double perUnitEnergy = 1.0;   ///< E
  int timeSlots = 1;            ///< silent-transmission slots D

  double symbolEnergy(int numUnits) const { return numUnits * perUnitEnergy; }
  int effectiveDims(int receiveDims) const { return timeSlots * receiveDims; }
};

/// N tables of 2^R_n constituent vectors of length K. The M = 2^(N R_n)
/// constellation points exist only implicitly as sums of one constituent per
/// unit. Immutable after construction.
class LayeredConstellation {
 public:
  /// Each matrix is K x 2^R_n with one constituent per column.
  explicit LayeredConstellation(std::vector<Eigen::MatrixXcd> tables);

  int numUnits() const { return static_cast<int>(tables_.size()); }
  int bitsPerUnit() const { return bitsPerUnit_; }
  int receiveDims() const { return static_cast<int>(tables_.front().rows()); }
  int tableSize() const { return static_cast<int>(tables_.front().cols()); }
  int rate() const { return numUnits() * bitsPerUnit_; }
  /// Number of points M = 2^R.
  double cardinality() const;

  const Eigen::MatrixXcd& table(int unit) const { return tables_[unit]; }
  auto constituent(int unit, std::uint32_t index) const { return tables_[unit].col(index); }

  /// Real-stacked table [Re; Im] (2K x S), used for inner products.
  const Eigen::MatrixXd& stackedTable(int unit) const { return stacked_[unit]; }
  /// ||h^n(m)||^2 per column.
  const Eigen::VectorXd& constituentNorms(int unit) const { return norms_[unit]; }

  bool isValid(const MessageVector& m) const;

  friend bool operator==(const LayeredConstellation& a, const LayeredConstellation& b);

 private:
  std::vector<Eigen::MatrixXcd> tables_;
  std::vector<Eigen::MatrixXd> stacked_;
  std::vector<Eigen::VectorXd> norms_;
  int bitsPerUnit_ = 0;
};

/// i.i.d. CN(0,1) constituents, drawn in (unit, index, component) order.
LayeredConstellation generateConstellation(int numUnits, int bitsPerUnit, int receiveDims,
                                           std::uint64_t seed);
LayeredConstellation generateConstellation(int numUnits, int bitsPerUnit, int receiveDims,
                                           Rng& rng);

/// Wraps the given constituents verbatim; tables[n][m] is h^n(m).
LayeredConstellation constellationFromTable(
    const std::vector<std::vector<ComplexVector>>& tables);

/// Folds a linear SBM weight set into each unit: the expanded unit table has
/// |weights| * 2^R_n entries, entry (m << log2|W|) | w holding weights[w] * h(m).
/// Rate accounting picks up log2|W| extra bits per unit.
LayeredConstellation withSbmWeights(const LayeredConstellation& c,
                                    std::span<const Complex> weightSet);

/// sum_n s_n h^n(m_n), accumulated left to right in unit order.
ComplexVector mapToPoint(const LayeredConstellation& c, const MessageVector& m,
                         const SbmSymbolVector& s);
ComplexVector mapToPoint(const LayeredConstellation& c, const MessageVector& m);

/// sqrt(E) * point + z with z_k ~ CN(0, N0).
ComplexVector transmit(const ComplexVector& point, const ChannelParams& params, Rng& rng);
ComplexVector transmit(const ComplexVector& point, const ChannelParams& params,
                       std::uint64_t seed);

/// N0 = N E / (R 10^(ebN0/10)). +inf dB maps to N0 = 0.
/// `rate` is information bits per channel use and may be fractional.
double ebN0ToN0(double ebN0Db, int numUnits, double perUnitEnergy, double rate);
double n0ToEbN0Db(double n0, int numUnits, double perUnitEnergy, double rate);

MessageVector randomMessage(const LayeredConstellation& c, Rng& rng);

/// Text table: "mbm-constellation 1" / "N R_n K" / one constituent per line as
/// K pairs "re im" with round-trip precision.
void writeConstellation(std::ostream& os, const LayeredConstellation& c);
LayeredConstellation readConstellation(std::istream& is);

}  // namespace mbm
