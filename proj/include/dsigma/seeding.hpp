//
// Copyright 2026 The dsigma Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Deterministic seed derivation. Every randomized component draws from its
// own stream, keyed by a component name and an index, so results never
// depend on how work is split across threads.

#ifndef DSIGMA_SEEDING_HPP_
#define DSIGMA_SEEDING_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace dsigma {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t fnv1a64(std::string_view s,
                                       std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// seed' = splitmix64(splitmix64(master ^ fnv1a(component)) + index)
inline constexpr std::uint64_t derive_seed(std::uint64_t master,
                                           std::string_view component,
                                           std::uint64_t index = 0) {
  return splitmix64(splitmix64(master ^ fnv1a64(component)) + index);
}

inline Rng make_rng(std::uint64_t master, std::string_view component,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(master, component, index));
}

// Uniform double in [0, 1) with 53 random bits. Used instead of
// std::uniform_real_distribution so draws are identical across standard
// library implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound) by rejection (bound >= 1).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

}  // namespace dsigma

#endif  // DSIGMA_SEEDING_HPP_
