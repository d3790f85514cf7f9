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

#include "mbm/fec.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace mbm {

std::uint32_t GaloisField::defaultPrimitive(int bits) {
  static constexpr std::array<std::uint32_t, 17> kPolys = {
      0,      0,      0x7,    0xb,    0x13,   0x25,   0x43,   0x89,    0x11d,
      0x211,  0x409,  0x805,  0x1053, 0x201b, 0x4443, 0x8003, 0x1100b};
  if (bits < 2 || bits > 16) throw std::invalid_argument("field bits must be in [2, 16]");
  return kPolys[bits];
}

GaloisField::GaloisField(int bits, std::uint32_t primitivePoly)
    : bits_(bits),
      size_(bits >= 2 && bits <= 16 ? (1u << bits) : 0),
      poly_(primitivePoly ? primitivePoly : defaultPrimitive(bits)) {
  if (size_ == 0) throw std::invalid_argument("field bits must be in [2, 16]");
  if ((poly_ >> bits_) != 1) throw std::invalid_argument("primitive polynomial has wrong degree");
  const std::uint32_t order = size_ - 1;
  exp_.assign(2 * order, 0);
  log_.assign(size_, -1);
  std::uint32_t x = 1;
  for (std::uint32_t i = 0; i < order; ++i) {
    if (log_[x] != -1) throw std::invalid_argument("polynomial is not primitive");
    exp_[i] = static_cast<Symbol>(x);
    log_[x] = static_cast<int>(i);
    x <<= 1;
    if (x & size_) x ^= poly_;
  }
  if (x != 1) throw std::invalid_argument("polynomial is not primitive");
  for (std::uint32_t i = order; i < 2 * order; ++i) exp_[i] = exp_[i - order];
}

Symbol GaloisField::div(Symbol a, Symbol b) const {
  if (b == 0) throw std::domain_error("division by zero in GF(2^w)");
  if (a == 0) return 0;
  const int order = static_cast<int>(size_ - 1);
  return exp_[(log_[a] - log_[b] + order) % order];
}

Symbol GaloisField::inv(Symbol a) const { return div(1, a); }

Symbol GaloisField::pow(Symbol a, long long e) const {
  if (a == 0) return e == 0 ? 1 : 0;
  const long long order = size_ - 1;
  long long k = (static_cast<long long>(log_[a]) * (e % order)) % order;
  if (k < 0) k += order;
  return exp_[k];
}

Symbol GaloisField::alphaPow(long long e) const {
  const long long order = size_ - 1;
  long long k = e % order;
  if (k < 0) k += order;
  return exp_[k];
}

int GaloisField::log(Symbol a) const {
  if (a == 0 || a >= size_) throw std::domain_error("log of zero or out-of-field symbol");
  return log_[a];
}

RsCode::RsCode(int fieldBits, int length, int dimension)
    : field_(std::make_shared<const GaloisField>(fieldBits)), length_(length), dimension_(dimension) {
  const auto maxLength = static_cast<int>(field_->size() - 1);
  if (length_ < 2 || length_ > maxLength) {
    throw std::invalid_argument("RS length must be in [2, 2^w - 1]");
  }
  if (dimension_ < 1 || dimension_ >= length_) {
    throw std::invalid_argument("RS dimension must satisfy 1 <= D < L");
  }
  const int parity = length_ - dimension_;
  const auto& gf = *field_;
  generator_ = {1};
  for (int i = 1; i <= parity; ++i) {
    // multiply by (x + alpha^i)
    const Symbol root = gf.alphaPow(i);
    std::vector<Symbol> next(generator_.size() + 1, 0);
    for (std::size_t j = 0; j < generator_.size(); ++j) {
      next[j] ^= generator_[j];
      next[j + 1] ^= gf.mul(generator_[j], root);
    }
    generator_ = std::move(next);
  }
}

std::vector<Symbol> RsCode::encode(std::span<const Symbol> message) const {
  if (static_cast<int>(message.size()) != dimension_) {
    throw std::invalid_argument("RS message length must equal the code dimension");
  }
  const auto& gf = *field_;
  const int parity = length_ - dimension_;
  std::vector<Symbol> reg(parity, 0);
  for (const Symbol m : message) {
    if (m >= gf.size()) throw std::invalid_argument("message symbol outside the field");
    const Symbol feedback = m ^ reg[0];
    for (int j = 0; j + 1 < parity; ++j) reg[j] = reg[j + 1] ^ gf.mul(feedback, generator_[j + 1]);
    reg[parity - 1] = gf.mul(feedback, generator_[parity]);
  }
  std::vector<Symbol> codeword(message.begin(), message.end());
  codeword.insert(codeword.end(), reg.begin(), reg.end());
  return codeword;
}

std::vector<Symbol> RsCode::syndromes(std::span<const Symbol> word) const {
  const auto& gf = *field_;
  const int parity = length_ - dimension_;
  std::vector<Symbol> s(parity, 0);
  for (int j = 0; j < parity; ++j) {
    const Symbol x = gf.alphaPow(j + 1);
    Symbol acc = 0;
    for (const Symbol c : word) acc = gf.mul(acc, x) ^ c;
    s[j] = acc;
  }
  return s;
}

RsDecodeResult RsCode::decode(std::span<const Symbol> received) const {
  if (static_cast<int>(received.size()) != length_) {
    throw std::invalid_argument("RS received word length must equal the code length");
  }
  const auto& gf = *field_;
  for (const Symbol c : received) {
    if (c >= gf.size()) throw std::invalid_argument("received symbol outside the field");
  }

  RsDecodeResult result;
  result.codeword.assign(received.begin(), received.end());
  auto finish = [&](bool ok) {
    result.success = ok;
    result.message.assign(result.codeword.begin(), result.codeword.begin() + dimension_);
    return result;
  };

  const std::vector<Symbol> synd = syndromes(received);
  if (std::all_of(synd.begin(), synd.end(), [](Symbol s) { return s == 0; })) return finish(true);

  // Berlekamp-Massey; polynomials stored lowest degree first.
  const int parity = length_ - dimension_;
  std::vector<Symbol> lambda{1}, prev{1};
  int degree = 0;
  int shift = 1;
  Symbol prevDiscrepancy = 1;
  for (int n = 0; n < parity; ++n) {
    Symbol d = synd[n];
    for (int i = 1; i <= degree && i < static_cast<int>(lambda.size()); ++i) {
      d ^= gf.mul(lambda[i], synd[n - i]);
    }
    if (d == 0) {
      ++shift;
      continue;
    }
    const Symbol coef = gf.div(d, prevDiscrepancy);
    std::vector<Symbol> updated = lambda;
    if (updated.size() < prev.size() + shift) updated.resize(prev.size() + shift, 0);
    for (std::size_t i = 0; i < prev.size(); ++i) updated[i + shift] ^= gf.mul(coef, prev[i]);
    if (2 * degree <= n) {
      prev = lambda;
      degree = n + 1 - degree;
      prevDiscrepancy = d;
      shift = 1;
    } else {
      ++shift;
    }
    lambda = std::move(updated);
  }
  lambda.resize(degree + 1);
  if (degree > correctable() || lambda[degree] == 0) return finish(false);

  // Chien search over the L valid positions; position i has degree L-1-i.
  std::vector<int> positions;
  std::vector<Symbol> inverseLocators;
  for (int i = 0; i < length_; ++i) {
    const int power = length_ - 1 - i;
    const Symbol xInv = gf.alphaPow(-power);
    Symbol v = 0;
    for (int k = degree; k >= 0; --k) v = gf.mul(v, xInv) ^ lambda[k];
    if (v == 0) {
      positions.push_back(i);
      inverseLocators.push_back(xInv);
    }
  }
  if (static_cast<int>(positions.size()) != degree) return finish(false);

  // Omega = S(x) Lambda(x) mod x^parity.
  std::vector<Symbol> omega(parity, 0);
  for (int i = 0; i < parity; ++i) {
    for (int j = 0; j <= degree && j <= i; ++j) omega[i] ^= gf.mul(synd[i - j], lambda[j]);
  }
  for (std::size_t e = 0; e < positions.size(); ++e) {
    const Symbol xInv = inverseLocators[e];
    Symbol num = 0;
    for (int k = parity - 1; k >= 0; --k) num = gf.mul(num, xInv) ^ omega[k];
    // Formal derivative keeps odd-degree terms only.
    Symbol den = 0;
    for (int k = 1; k <= degree; k += 2) den ^= gf.mul(lambda[k], gf.pow(xInv, k - 1));
    if (den == 0) return finish(false);
    result.codeword[positions[e]] ^= gf.div(num, den);
  }

  const auto check = syndromes(result.codeword);
  if (!std::all_of(check.begin(), check.end(), [](Symbol s) { return s == 0; })) {
    result.codeword.assign(received.begin(), received.end());
    return finish(false);
  }
  result.corrected = degree;
  return finish(true);
}

void SymbolMapping::validate() const {
  if (numUnits < 1 || bitsPerUnit < 1) throw std::invalid_argument("bad MBM shape in symbol mapping");
  if (fieldBits < 2 || fieldBits > 16) throw std::invalid_argument("field bits must be in [2, 16]");
  if (bitsPerChannelUse() % fieldBits != 0) {
    throw std::invalid_argument("field bits must divide the bits per channel use");
  }
  if (bitsPerChannelUse() > 64) throw std::invalid_argument("channel use above 64 bits");
}

std::vector<MessageVector> mapCodewordToMessages(std::span<const Symbol> codeword,
                                                 const SymbolMapping& mapping) {
  mapping.validate();
  const auto per = static_cast<std::size_t>(mapping.symbolsPerChannelUse());
  if (codeword.size() % per != 0) {
    throw std::invalid_argument("codeword length is not a multiple of symbols per channel use");
  }
  std::vector<MessageVector> out;
  out.reserve(codeword.size() / per);
  for (std::size_t i = 0; i < codeword.size(); i += per) {
    std::uint64_t value = 0;
    for (std::size_t j = 0; j < per; ++j) value = (value << mapping.fieldBits) | codeword[i + j];
    out.push_back(MessageVector::decode(value, mapping.numUnits, mapping.bitsPerUnit));
  }
  return out;
}

std::vector<Symbol> mapMessagesToCodeword(std::span<const MessageVector> messages,
                                          const SymbolMapping& mapping) {
  mapping.validate();
  const int per = mapping.symbolsPerChannelUse();
  const std::uint64_t mask = (std::uint64_t{1} << mapping.fieldBits) - 1;
  std::vector<Symbol> out;
  out.reserve(messages.size() * per);
  for (const auto& m : messages) {
    const std::uint64_t value = m.encode(mapping.bitsPerUnit);
    for (int j = per - 1; j >= 0; --j) {
      out.push_back(static_cast<Symbol>((value >> (j * mapping.fieldBits)) & mask));
    }
  }
  return out;
}

}  // namespace mbm
