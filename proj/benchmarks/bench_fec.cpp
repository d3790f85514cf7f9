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

#include "mbm/fec.hpp"
#include "mbm/rng.hpp"

namespace {

using namespace mbm;

void BM_RsDecode(benchmark::State& state) {
  const int errors = static_cast<int>(state.range(0));
  const RsCode code(8, 255, 223);
  Rng rng = makeRng(3, Stream::Message);
  std::uniform_int_distribution<Symbol> symbol(0, 255);
  std::vector<Symbol> message(223);
  for (auto& s : message) s = symbol(rng);
  auto word = code.encode(message);
  for (int e = 0; e < errors; ++e) word[static_cast<std::size_t>(e) * 15] ^= 0x5a;
  for (auto _ : state) benchmark::DoNotOptimize(code.decode(word));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RsDecode)->Arg(0)->Arg(4)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_RsEncode(benchmark::State& state) {
  const RsCode code(8, 255, 223);
  std::vector<Symbol> message(223, 0x3c);
  for (auto _ : state) benchmark::DoNotOptimize(code.encode(message));
}
BENCHMARK(BM_RsEncode)->Unit(benchmark::kMicrosecond);

}  // namespace
