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

#include <benchmark/benchmark.h>

#include "mbm/detect.hpp"

namespace {

using namespace mbm;

std::vector<ComplexVector> received(const LayeredConstellation& c, double ebN0Db, int count) {
  const double n0 = ebN0ToN0(ebN0Db, c.numUnits(), 1.0, c.numUnits() * c.bitsPerUnit());
  std::vector<ComplexVector> out;
  for (int i = 0; i < count; ++i) {
    Rng rng = makeRng(17, Stream::Trial, i);
    out.push_back(transmit(mapToPoint(c, randomMessage(c, rng)), ChannelParams{n0, 1.0, 1}, rng));
  }
  return out;
}

void BM_Exhaustive(benchmark::State& state) {
  const int units = static_cast<int>(state.range(0));
  const auto c = generateConstellation(units, 16 / units, 8, 1);
  const auto inputs = received(c, 0.0, 64);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(detectExhaustive(inputs[i++ % inputs.size()], c));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Exhaustive)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

void BM_Layered(benchmark::State& state) {
  const int beam = static_cast<int>(state.range(0));
  const int perms = static_cast<int>(state.range(1));
  const auto c = generateConstellation(4, 8, 16, 2);
  const auto inputs = received(c, -4.5, 16);
  LayeredDetector detector(DetectorConfig::standard(4, 2, beam, perms));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(detector.detect(inputs[i++ % inputs.size()], c));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Layered)
    ->Args({1, 1})
    ->Args({8, 1})
    ->Args({32, 6})
    ->Args({128, 24})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
