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

#include "mbm/rng.hpp"

namespace mbm {
namespace {

constexpr std::uint64_t mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t deriveSeed(std::uint64_t master, Stream stream, std::uint64_t a,
                         std::uint64_t b) noexcept {
  std::uint64_t h = mix(master);
  h = mix(h ^ static_cast<std::uint64_t>(stream));
  h = mix(h ^ a);
  h = mix(h ^ (b + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace mbm
