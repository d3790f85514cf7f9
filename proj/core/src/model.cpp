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

#include "mbm/model.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mbm {
namespace {

bool isPowerOfTwo(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

std::uint64_t MessageVector::encode(int bitsPerUnit) const {
  if (bitsPerUnit < 0 || bitsPerUnit > 32 ||
      static_cast<std::size_t>(bitsPerUnit) * indices.size() > 64) {
    throw std::invalid_argument("message does not fit in 64 bits");
  }
  std::uint64_t value = 0;
  for (auto idx : indices) {
    value = (value << bitsPerUnit) | idx;
  }
  return value;
}

MessageVector MessageVector::decode(std::uint64_t value, int numUnits, int bitsPerUnit) {
  MessageVector m;
  m.indices.resize(numUnits);
  const std::uint64_t mask = (std::uint64_t{1} << bitsPerUnit) - 1;
  for (int n = numUnits - 1; n >= 0; --n) {
    m.indices[n] = static_cast<std::uint32_t>(value & mask);
    value >>= bitsPerUnit;
  }
  return m;
}

SbmSymbolVector SbmSymbolVector::allOnes(int numUnits) {
  return SbmSymbolVector{std::vector<Complex>(numUnits, Complex{1.0, 0.0})};
}

void SbmSymbolVector::validate(int numUnits) const {
  if (static_cast<int>(weights.size()) != numUnits) {
    throw std::invalid_argument("SBM weight count does not match number of units");
  }
  for (const auto& w : weights) {
    if (std::abs(std::abs(w) - 1.0) > 1e-12) {
      throw std::invalid_argument("SBM weights must have unit modulus");
    }
  }
}

LayeredConstellation::LayeredConstellation(std::vector<Eigen::MatrixXcd> tables)
    : tables_(std::move(tables)) {
  if (tables_.empty()) throw std::invalid_argument("constellation needs at least one unit");
  const auto dims = tables_.front().rows();
  const auto size = tables_.front().cols();
  if (dims < 1) throw std::invalid_argument("constituent vectors must have length >= 1");
  if (!isPowerOfTwo(static_cast<std::size_t>(size))) {
    throw std::invalid_argument("unit table size must be a power of two");
  }
  for (const auto& t : tables_) {
    if (t.rows() != dims) throw std::invalid_argument("ragged constituent vector lengths");
    if (t.cols() != size) throw std::invalid_argument("all unit tables must have equal size");
  }
  bitsPerUnit_ = std::countr_zero(static_cast<std::uint64_t>(size));
  if (rate() > 64) throw std::invalid_argument("total rate above 64 bits is not supported");

  stacked_.reserve(tables_.size());
  norms_.reserve(tables_.size());
  for (const auto& t : tables_) {
    Eigen::MatrixXd s(2 * dims, size);
    s.topRows(dims) = t.real();
    s.bottomRows(dims) = t.imag();
    stacked_.push_back(std::move(s));
    norms_.push_back(t.colwise().squaredNorm().transpose());
  }
}

double LayeredConstellation::cardinality() const { return std::ldexp(1.0, rate()); }

bool LayeredConstellation::isValid(const MessageVector& m) const {
  if (static_cast<int>(m.size()) != numUnits()) return false;
  for (auto idx : m.indices) {
    if (idx >= static_cast<std::uint32_t>(tableSize())) return false;
  }
  return true;
}

bool operator==(const LayeredConstellation& a, const LayeredConstellation& b) {
  if (a.numUnits() != b.numUnits() || a.receiveDims() != b.receiveDims() ||
      a.tableSize() != b.tableSize()) {
    return false;
  }
  for (int n = 0; n < a.numUnits(); ++n) {
    if (a.tables_[n] != b.tables_[n]) return false;
  }
  return true;
}

LayeredConstellation generateConstellation(int numUnits, int bitsPerUnit, int receiveDims,
                                           std::uint64_t seed) {
  Rng rng = makeRng(seed, Stream::Constellation);
  return generateConstellation(numUnits, bitsPerUnit, receiveDims, rng);
}

LayeredConstellation generateConstellation(int numUnits, int bitsPerUnit, int receiveDims,
                                           Rng& rng) {
  if (numUnits < 1 || bitsPerUnit < 1 || receiveDims < 1) {
    throw std::invalid_argument("numUnits, bitsPerUnit and receiveDims must be positive");
  }
  if (bitsPerUnit > 24) throw std::invalid_argument("bitsPerUnit above 24 is not supported");
  ComplexGaussian gauss(1.0);
  const Eigen::Index size = Eigen::Index{1} << bitsPerUnit;
  std::vector<Eigen::MatrixXcd> tables;
  tables.reserve(numUnits);
  for (int n = 0; n < numUnits; ++n) {
    Eigen::MatrixXcd t(receiveDims, size);
    for (Eigen::Index m = 0; m < size; ++m) {
      for (int k = 0; k < receiveDims; ++k) t(k, m) = gauss(rng);
    }
    tables.push_back(std::move(t));
  }
  return LayeredConstellation(std::move(tables));
}

LayeredConstellation constellationFromTable(
    const std::vector<std::vector<ComplexVector>>& tables) {
  if (tables.empty()) throw std::invalid_argument("constellation needs at least one unit");
  std::vector<Eigen::MatrixXcd> mats;
  mats.reserve(tables.size());
  for (const auto& unit : tables) {
    if (unit.empty()) throw std::invalid_argument("unit table must be nonempty");
    const auto dims = unit.front().size();
    Eigen::MatrixXcd t(dims, static_cast<Eigen::Index>(unit.size()));
    for (std::size_t m = 0; m < unit.size(); ++m) {
      if (unit[m].size() != dims) throw std::invalid_argument("ragged constituent vector lengths");
      t.col(static_cast<Eigen::Index>(m)) = unit[m];
    }
    mats.push_back(std::move(t));
  }
  return LayeredConstellation(std::move(mats));
}

LayeredConstellation withSbmWeights(const LayeredConstellation& c,
                                    std::span<const Complex> weightSet) {
  if (!isPowerOfTwo(weightSet.size())) {
    throw std::invalid_argument("SBM weight set size must be a power of two");
  }
  for (const auto& w : weightSet) {
    if (std::abs(std::abs(w) - 1.0) > 1e-12) {
      throw std::invalid_argument("SBM weights must have unit modulus");
    }
  }
  const auto wCount = static_cast<Eigen::Index>(weightSet.size());
  std::vector<Eigen::MatrixXcd> tables;
  for (int n = 0; n < c.numUnits(); ++n) {
    const auto& src = c.table(n);
    Eigen::MatrixXcd t(src.rows(), src.cols() * wCount);
    for (Eigen::Index m = 0; m < src.cols(); ++m) {
      for (Eigen::Index w = 0; w < wCount; ++w) t.col(m * wCount + w) = weightSet[w] * src.col(m);
    }
    tables.push_back(std::move(t));
  }
  return LayeredConstellation(std::move(tables));
}

ComplexVector mapToPoint(const LayeredConstellation& c, const MessageVector& m,
                         const SbmSymbolVector& s) {
  if (!c.isValid(m)) throw std::out_of_range("message index out of range for constellation");
  s.validate(c.numUnits());
  ComplexVector point = s.weights[0] * c.constituent(0, m.indices[0]);
  for (int n = 1; n < c.numUnits(); ++n) point += s.weights[n] * c.constituent(n, m.indices[n]);
  return point;
}

ComplexVector mapToPoint(const LayeredConstellation& c, const MessageVector& m) {
  if (!c.isValid(m)) throw std::out_of_range("message index out of range for constellation");
  ComplexVector point = c.constituent(0, m.indices[0]);
  for (int n = 1; n < c.numUnits(); ++n) point += c.constituent(n, m.indices[n]);
  return point;
}

ComplexVector transmit(const ComplexVector& point, const ChannelParams& params, Rng& rng) {
  if (params.n0 < 0.0 || params.perUnitEnergy <= 0.0) {
    throw std::invalid_argument("channel requires N0 >= 0 and E > 0");
  }
  ComplexVector r = std::sqrt(params.perUnitEnergy) * point;
  if (params.n0 > 0.0) {
    ComplexGaussian gauss(params.n0);
    for (Eigen::Index k = 0; k < r.size(); ++k) r[k] += gauss(rng);
  }
  return r;
}

ComplexVector transmit(const ComplexVector& point, const ChannelParams& params,
                       std::uint64_t seed) {
  Rng rng = makeRng(seed, Stream::Noise);
  return transmit(point, params, rng);
}

double ebN0ToN0(double ebN0Db, int numUnits, double perUnitEnergy, double rate) {
  if (!(rate > 0.0) || !(perUnitEnergy > 0.0)) throw std::invalid_argument("need R > 0 and E > 0");
  if (std::isinf(ebN0Db) && ebN0Db > 0) return 0.0;
  return numUnits * perUnitEnergy / (rate * std::pow(10.0, ebN0Db / 10.0));
}

double n0ToEbN0Db(double n0, int numUnits, double perUnitEnergy, double rate) {
  if (!(rate > 0.0) || !(perUnitEnergy > 0.0)) throw std::invalid_argument("need R > 0 and E > 0");
  if (n0 == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(numUnits * perUnitEnergy / (rate * n0));
}

MessageVector randomMessage(const LayeredConstellation& c, Rng& rng) {
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(c.tableSize() - 1));
  MessageVector m;
  m.indices.resize(c.numUnits());
  for (auto& idx : m.indices) idx = pick(rng);
  return m;
}

void writeConstellation(std::ostream& os, const LayeredConstellation& c) {
  const auto oldPrecision = os.precision(std::numeric_limits<double>::max_digits10);
  os << "mbm-constellation 1\n"
     << c.numUnits() << ' ' << c.bitsPerUnit() << ' ' << c.receiveDims() << '\n';
  for (int n = 0; n < c.numUnits(); ++n) {
    for (int m = 0; m < c.tableSize(); ++m) {
      const auto h = c.constituent(n, static_cast<std::uint32_t>(m));
      for (int k = 0; k < c.receiveDims(); ++k) {
        if (k) os << ' ';
        os << h[k].real() << ' ' << h[k].imag();
      }
      os << '\n';
    }
  }
  os.precision(oldPrecision);
}

LayeredConstellation readConstellation(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "mbm-constellation" || version != 1) {
    throw std::runtime_error("not an mbm-constellation v1 stream");
  }
  int numUnits = 0, bitsPerUnit = 0, dims = 0;
  if (!(is >> numUnits >> bitsPerUnit >> dims) || numUnits < 1 || bitsPerUnit < 0 ||
      bitsPerUnit > 24 || dims < 1) {
    throw std::runtime_error("bad constellation header");
  }
  const Eigen::Index size = Eigen::Index{1} << bitsPerUnit;
  std::vector<Eigen::MatrixXcd> tables;
  for (int n = 0; n < numUnits; ++n) {
    Eigen::MatrixXcd t(dims, size);
    for (Eigen::Index m = 0; m < size; ++m) {
      for (int k = 0; k < dims; ++k) {
        double re = 0, im = 0;
        if (!(is >> re >> im)) throw std::runtime_error("truncated constellation table");
        t(k, m) = Complex{re, im};
      }
    }
    tables.push_back(std::move(t));
  }
  return LayeredConstellation(std::move(tables));
}

}  // namespace mbm
