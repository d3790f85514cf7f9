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

#include "mbm/analysis.hpp"

namespace {

using namespace mbm;

void BM_ClosedForm(benchmark::State& state) {
  const ErrorModelParams p{10.0, static_cast<int>(state.range(0)), 2, 0};
  for (auto _ : state) benchmark::DoNotOptimize(pairwiseErrorClosedForm(p));
}
BENCHMARK(BM_ClosedForm)->Arg(1)->Arg(16)->Arg(256);

void BM_MutualInformation(benchmark::State& state) {
  const auto points = randomGaussianPoints(256, 1, 4);
  for (auto _ : state) benchmark::DoNotOptimize(mutualInformationMC(points, 100.0, 1000, 5));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_MutualInformation)->Unit(benchmark::kMillisecond);

}  // namespace
