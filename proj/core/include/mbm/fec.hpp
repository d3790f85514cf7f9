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
#include <memory>
#include <span>
#include <vector>

#include "mbm/model.hpp"

namespace mbm {

using Symbol = std::uint16_t;

/// GF(2^w) for 2 <= w <= 16 via log/antilog tables.
class GaloisField {
 public:
  /// primitivePoly = 0 selects defaultPrimitive(bits).
  explicit GaloisField(int bits, std::uint32_t primitivePoly = 0);

  /// Conventional primitive polynomials, e.g. 0x11d for w = 8, 0x13 for w = 4.
  static std::uint32_t defaultPrimitive(int bits);

  int bits() const { return bits_; }
  std::uint32_t size() const { return size_; }
  std::uint32_t primitivePoly() const { return poly_; }

  Symbol add(Symbol a, Symbol b) const { return a ^ b; }
  Symbol mul(Symbol a, Symbol b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  Symbol div(Symbol a, Symbol b) const;
  Symbol inv(Symbol a) const;
  Symbol pow(Symbol a, long long e) const;
  /// alpha^e for any integer e.
  Symbol alphaPow(long long e) const;
  int log(Symbol a) const;

 private:
  int bits_;
  std::uint32_t size_;
  std::uint32_t poly_;
  std::vector<Symbol> exp_;  // doubled so mul needs no modulo
  std::vector<int> log_;
};

struct RsDecodeResult {
  std::vector<Symbol> message;
  std::vector<Symbol> codeword;
  bool success = false;
  int corrected = 0;  ///< symbol errors fixed; meaningful only on success
};

/// Systematic (L, D) Reed-Solomon code over GF(2^w), generator roots
/// alpha^1 .. alpha^(L-D). Codewords list coefficients from the highest
/// degree down: the D message symbols, then the L-D parity symbols. For
/// L < 2^w - 1 the code is the length-(2^w - 1) code with leading message
/// positions fixed to zero and dropped.
class RsCode {
 public:
  RsCode(int fieldBits, int length, int dimension);

  int fieldBits() const { return field_->bits(); }
  int length() const { return length_; }
  int dimension() const { return dimension_; }
  int minDistance() const { return length_ - dimension_ + 1; }
  /// t = floor((d_min - 1) / 2).
  int correctable() const { return (minDistance() - 1) / 2; }
  const GaloisField& field() const { return *field_; }
  const std::vector<Symbol>& generator() const { return generator_; }

  std::vector<Symbol> encode(std::span<const Symbol> message) const;
  /// Bounded-distance hard-decision decoding (Berlekamp-Massey, Chien,
  /// Forney). Patterns beyond t either fail or miscorrect to another codeword.
  RsDecodeResult decode(std::span<const Symbol> received) const;
  /// Evaluates the received word at alpha^1 .. alpha^(L-D).
  std::vector<Symbol> syndromes(std::span<const Symbol> word) const;

 private:
  std::shared_ptr<const GaloisField> field_;
  int length_;
  int dimension_;
  std::vector<Symbol> generator_;  // monic, highest degree first
};

/// Packs R/w field symbols into one R-bit MBM message.
struct SymbolMapping {
  int numUnits = 1;
  int bitsPerUnit = 1;
  int fieldBits = 1;

  int bitsPerChannelUse() const { return numUnits * bitsPerUnit; }
  int symbolsPerChannelUse() const { return bitsPerChannelUse() / fieldBits; }
  void validate() const;
};

/// Consecutive groups of R/w symbols become one R-bit value (first symbol
/// most significant), which is split into N indices of R_n bits with unit 0
/// taking the most significant bits.
std::vector<MessageVector> mapCodewordToMessages(std::span<const Symbol> codeword,
                                                 const SymbolMapping& mapping);
std::vector<Symbol> mapMessagesToCodeword(std::span<const MessageVector> messages,
                                          const SymbolMapping& mapping);

}  // namespace mbm
