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

#include "mbm/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace mbm {
namespace {

Eigen::VectorXd stack(const ComplexVector& r) {
  Eigen::VectorXd s(2 * r.size());
  s.head(r.size()) = r.real();
  s.tail(r.size()) = r.imag();
  return s;
}

double finalDistance(const ComplexVector& r, const LayeredConstellation& c,
                     const MessageVector& m) {
  return (r - mapToPoint(c, m)).squaredNorm();
}

}  // namespace

std::vector<std::vector<int>> allPermutations(int numUnits) {
  std::vector<int> p(numUnits);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

DetectorConfig DetectorConfig::plain(int numUnits, int iterations) {
  DetectorConfig cfg;
  cfg.iterations = iterations;
  cfg.beamWidth = 1;
  std::vector<int> id(numUnits);
  std::iota(id.begin(), id.end(), 0);
  cfg.permutations = {id};
  return cfg;
}

DetectorConfig DetectorConfig::standard(int numUnits, int iterations, int beamWidth,
                                        int maxPermutations, std::uint64_t seed) {
  if (numUnits < 1) throw std::invalid_argument("numUnits must be positive");
  DetectorConfig cfg;
  cfg.iterations = iterations;
  cfg.beamWidth = beamWidth;
  if (numUnits <= 4) {
    const auto all = allPermutations(numUnits);
    const auto total = all.size();
    if (maxPermutations <= 0 || total <= static_cast<std::size_t>(maxPermutations)) {
      cfg.permutations = all;
      return cfg;
    }
    for (int i = 0; i < maxPermutations; ++i) {
      cfg.permutations.push_back(all[static_cast<std::size_t>(i) * total / maxPermutations]);
    }
    return cfg;
  }
  std::vector<int> p(numUnits);
  std::iota(p.begin(), p.end(), 0);
  cfg.permutations.push_back(p);
  Rng rng = makeRng(seed, Stream::Permutation);
  // Distinct random orderings; the loop bound guards tiny N! < maxPermutations.
  for (int attempt = 0;
       static_cast<int>(cfg.permutations.size()) < maxPermutations && attempt < 100 * maxPermutations;
       ++attempt) {
    std::shuffle(p.begin(), p.end(), rng);
    if (std::find(cfg.permutations.begin(), cfg.permutations.end(), p) == cfg.permutations.end()) {
      cfg.permutations.push_back(p);
    }
  }
  return cfg;
}

void DetectorConfig::validate(int numUnits) const {
  if (iterations < 1) throw std::invalid_argument("detector iterations T must be >= 1");
  if (beamWidth < 1) throw std::invalid_argument("detector beam width P must be >= 1");
  if (permutations.empty()) throw std::invalid_argument("detector needs at least one permutation");
  for (const auto& p : permutations) {
    if (static_cast<int>(p.size()) != numUnits) {
      throw std::invalid_argument("permutation length does not match number of units");
    }
    std::vector<int> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < numUnits; ++i) {
      if (sorted[i] != i) throw std::invalid_argument("permutation is not an ordering of all units");
    }
  }
  if (earlyExitDistance < 0.0) throw std::invalid_argument("early-exit distance must be >= 0");
}

DetectionResult detectExhaustive(const ComplexVector& r, const LayeredConstellation& c,
                                 std::uint64_t cap) {
  const int numUnits = c.numUnits();
  const int size = c.tableSize();
  if (r.size() != c.receiveDims()) throw std::invalid_argument("received vector has wrong length");
  if (c.rate() >= 63 || (std::uint64_t{1} << c.rate()) > cap) {
    throw std::length_error("constellation exceeds the exhaustive-search cap");
  }

  const Eigen::VectorXd rr = stack(r);
  const int last = numUnits - 1;
  const auto& lastTable = c.stackedTable(last);
  const auto& lastNorms = c.constituentNorms(last);

  std::uint64_t prefixCount = 1;
  for (int n = 0; n < last; ++n) prefixCount *= static_cast<std::uint64_t>(size);

  constexpr std::uint64_t kBlock = 256;
  Eigen::MatrixXd residuals(rr.size(), static_cast<Eigen::Index>(std::min(prefixCount, kBlock)));
  Eigen::VectorXd residualNorms(residuals.cols());
  Eigen::MatrixXd scores;
  std::vector<std::uint32_t> prefix(std::max(last, 1), 0);

  double best = std::numeric_limits<double>::infinity();
  std::uint64_t bestCode = 0;

  for (std::uint64_t start = 0; start < prefixCount; start += kBlock) {
    const auto block = static_cast<Eigen::Index>(std::min(kBlock, prefixCount - start));
    for (Eigen::Index b = 0; b < block; ++b) {
      // prefix holds the odometer for prefix index start + b
      std::uint64_t code = start + static_cast<std::uint64_t>(b);
      for (int n = last - 1; n >= 0; --n) {
        prefix[n] = static_cast<std::uint32_t>(code % size);
        code /= size;
      }
      auto e = residuals.col(b);
      e = rr;
      for (int n = 0; n < last; ++n) e -= c.stackedTable(n).col(prefix[n]);
      residualNorms[b] = e.squaredNorm();
    }
    scores.noalias() = lastTable.transpose() * residuals.leftCols(block);
    for (Eigen::Index b = 0; b < block; ++b) {
      const std::uint64_t base = (start + static_cast<std::uint64_t>(b)) * size;
      for (int s = 0; s < size; ++s) {
        const double d = residualNorms[b] - 2.0 * scores(s, b) + lastNorms[s];
        if (d < best) {
          best = d;
          bestCode = base + static_cast<std::uint64_t>(s);
        }
      }
    }
  }

  DetectionResult result;
  result.message = MessageVector::decode(bestCode, numUnits, c.bitsPerUnit());
  result.distanceSquared = finalDistance(r, c, result.message);
  result.candidatesExamined = prefixCount * static_cast<std::uint64_t>(size);
  return result;
}

LayeredDetector::LayeredDetector(DetectorConfig config) : config_(std::move(config)) {}

double LayeredDetector::directDistance(const Eigen::VectorXd& stackedR,
                                       const LayeredConstellation& c,
                                       const std::int32_t* assign) const {
  Eigen::VectorXd point = Eigen::VectorXd::Zero(stackedR.size());
  for (int n = 0; n < c.numUnits(); ++n) {
    if (assign[n] >= 0) point += c.stackedTable(n).col(assign[n]);
  }
  return (stackedR - point).squaredNorm();
}

void LayeredDetector::runStep(const Eigen::VectorXd& stackedR, const LayeredConstellation& c,
                              int unit) {
  const int numUnits = c.numUnits();
  const int size = c.tableSize();
  const int beamSize = beam_.size;
  const std::int32_t* assign = beam_.assign.data();

  // Group beam entries by their assignment with `unit` masked out.
  auto maskedLess = [&](int a, int b) {
    for (int n = 0; n < numUnits; ++n) {
      if (n == unit) continue;
      const auto va = assign[a * numUnits + n];
      const auto vb = assign[b * numUnits + n];
      if (va != vb) return va < vb;
    }
    return false;
  };
  order_.resize(beamSize);
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(), maskedLess);
  groupRep_.clear();
  for (int i = 0; i < beamSize; ++i) {
    if (groupRep_.empty() || maskedLess(groupRep_.back(), order_[i])) groupRep_.push_back(order_[i]);
  }
  const int groups = static_cast<int>(groupRep_.size());

  residuals_.resize(stackedR.size(), groups);
  residualNorms_.resize(groups);
  for (int g = 0; g < groups; ++g) {
    const std::int32_t* a = assign + groupRep_[g] * numUnits;
    auto e = residuals_.col(g);
    e = stackedR;
    for (int n = 0; n < numUnits; ++n) {
      if (n != unit && a[n] >= 0) e -= c.stackedTable(n).col(a[n]);
    }
    residualNorms_[g] = e.squaredNorm();
  }
  // scores_(s, g) = ||h_s||^2 - 2 <h_s, e_g>; the candidate distance adds ||e_g||^2
  const auto& norms = c.constituentNorms(unit);
  scores_ = norms.replicate(1, groups);
  scores_.noalias() -= 2.0 * c.stackedTable(unit).transpose() * residuals_;
  examined_ += static_cast<std::uint64_t>(groups) * static_cast<std::uint64_t>(size);

  struct Candidate {
    double dist;
    int group;
    int index;
  };
  auto lexLess = [&](const Candidate& x, const Candidate& y) {
    const std::int32_t* ax = assign + groupRep_[x.group] * numUnits;
    const std::int32_t* ay = assign + groupRep_[y.group] * numUnits;
    for (int n = 0; n < numUnits; ++n) {
      const auto vx = n == unit ? x.index : ax[n];
      const auto vy = n == unit ? y.index : ay[n];
      if (vx != vy) return vx < vy;
    }
    return false;
  };
  auto better = [&](const Candidate& x, const Candidate& y) {
    if (x.dist != y.dist) return x.dist < y.dist;
    return lexLess(x, y);
  };
  // Max-heap on "better": top is the worst retained candidate.
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(better)> heap(better);
  const auto keep = static_cast<std::size_t>(config_.beamWidth);
  double worst = std::numeric_limits<double>::infinity();
  for (int g = 0; g < groups; ++g) {
    const double base = residualNorms_[g];
    const double* col = scores_.col(g).data();
    for (int s = 0; s < size; ++s) {
      const double d = base + col[s];
      if (d > worst) continue;
      const Candidate cand{d, g, s};
      if (heap.size() < keep) {
        heap.push(cand);
      } else if (better(cand, heap.top())) {
        heap.pop();
        heap.push(cand);
      } else {
        continue;
      }
      if (heap.size() == keep) worst = heap.top().dist;
    }
  }

  std::vector<Candidate> chosen;
  chosen.reserve(heap.size());
  while (!heap.empty()) {
    chosen.push_back(heap.top());
    heap.pop();
  }
  std::reverse(chosen.begin(), chosen.end());

  next_.size = static_cast<int>(chosen.size());
  next_.assign.resize(static_cast<std::size_t>(next_.size) * numUnits);
  next_.dist.resize(next_.size);
  for (int i = 0; i < next_.size; ++i) {
    std::int32_t* dst = next_.assign.data() + i * numUnits;
    const std::int32_t* src = assign + groupRep_[chosen[i].group] * numUnits;
    std::copy(src, src + numUnits, dst);
    dst[unit] = chosen[i].index;
    next_.dist[i] = directDistance(stackedR, c, dst);
  }
  std::swap(beam_, next_);
}

DetectionResult LayeredDetector::detect(const ComplexVector& r, const LayeredConstellation& c,
                                        const StepObserver& observer) {
  const int numUnits = c.numUnits();
  config_.validate(numUnits);
  if (r.size() != c.receiveDims()) throw std::invalid_argument("received vector has wrong length");

  const Eigen::VectorXd rr = stack(r);
  examined_ = 0;

  std::vector<std::int32_t> bestAssign;
  double bestDist = std::numeric_limits<double>::infinity();
  auto consider = [&](const std::int32_t* a, double d) {
    const bool lexSmaller =
        !bestAssign.empty() && std::lexicographical_compare(a, a + numUnits, bestAssign.begin(),
                                                            bestAssign.end());
    if (bestAssign.empty() || d < bestDist || (d == bestDist && lexSmaller)) {
      bestAssign.assign(a, a + numUnits);
      bestDist = d;
    }
  };

  bool stop = false;
  for (std::size_t p = 0; p < config_.permutations.size() && !stop; ++p) {
    const auto& order = config_.permutations[p];
    beam_.size = 1;
    beam_.assign.assign(numUnits, -1);
    beam_.dist.assign(1, rr.squaredNorm());

    for (int it = 0; it < config_.iterations && !stop; ++it) {
      for (int step = 0; step < numUnits && !stop; ++step) {
        runStep(rr, c, order[step]);
        const auto bestIt = std::min_element(beam_.dist.begin(), beam_.dist.end());
        const bool complete = it > 0 || step == numUnits - 1;
        if (observer) {
          observer(StepTrace{static_cast<int>(p), it, step, order[step], beam_.size, *bestIt,
                             complete});
        }
        if (complete && config_.earlyExitDistance > 0.0 && *bestIt < config_.earlyExitDistance) {
          stop = true;
        }
      }
    }
    for (int i = 0; i < beam_.size; ++i) {
      consider(beam_.assign.data() + i * numUnits, beam_.dist[i]);
    }
  }

  DetectionResult result;
  result.message.indices.assign(bestAssign.begin(), bestAssign.end());
  result.distanceSquared = finalDistance(r, c, result.message);
  result.candidatesExamined = examined_;
  return result;
}

DetectionResult detectLayered(const ComplexVector& r, const LayeredConstellation& c,
                              const DetectorConfig& config) {
  LayeredDetector detector(config);
  return detector.detect(r, c);
}

double agreementRate(const LayeredConstellation& c, const ChannelParams& params,
                     const DetectorConfig& config, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  LayeredDetector detector(config);
  const double scale = 1.0 / std::sqrt(params.perUnitEnergy);
  int agree = 0;
  for (int i = 0; i < trials; ++i) {
    Rng rng = makeRng(seed, Stream::Trial, static_cast<std::uint64_t>(i));
    const MessageVector m = randomMessage(c, rng);
    const ComplexVector r = scale * transmit(mapToPoint(c, m), params, rng);
    const auto exhaustive = detectExhaustive(r, c);
    const auto layered = detector.detect(r, c);
    const bool same = layered.message == exhaustive.message ||
                      std::abs(layered.distanceSquared - exhaustive.distanceSquared) <=
                          1e-9 * (1.0 + exhaustive.distanceSquared);
    agree += same ? 1 : 0;
  }
  return static_cast<double>(agree) / trials;
}

}  // namespace mbm
