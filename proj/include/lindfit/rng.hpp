// Copyright 2026 The lindfit Authors
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
#include <random>

namespace lindfit {

// Streams are keyed by (seed, domain, index) so any work split across threads
// draws exactly the same numbers.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 keyed_engine(std::uint64_t seed, std::uint64_t domain, std::uint64_t index) {
  const std::uint64_t k = splitmix64(splitmix64(splitmix64(seed) ^ domain) ^ index);
  std::seed_seq seq{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
                    static_cast<std::uint32_t>(domain), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

namespace stream {
constexpr std::uint64_t kTomography = 0x746f6d6fULL;
constexpr std::uint64_t kBasis = 0x62617369ULL;
}  // namespace stream

}  // namespace lindfit
