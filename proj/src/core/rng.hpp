// src/core/rng.hpp
//
// Copyright 2026 lhuclab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LHUC_CORE_RNG_HPP_
#define LHUC_CORE_RNG_HPP_

#include <cstdint>
#include <random>

namespace lhuc {

using Rng = std::mt19937_64;

// splitmix64 step; used only to derive well-separated stream seeds from a
// base seed, never as the working generator.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministically derives an independent seed for (stream, step) under a
// base seed.  Distinct (stream, step) pairs give unrelated sequences, so each
// consumer (shuffles, route draws, generators, ...) owns a stream id.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t step = 0) {
  std::uint64_t s = base;
  s ^= 0x6a09e667f3bcc909ULL * (stream + 1);
  splitmix64(s);
  s ^= 0xbb67ae8584caa73bULL * (step + 1);
  splitmix64(s);
  return splitmix64(s);
}

// Stream ids.  Values are part of the reproducibility contract: changing one
// changes every seeded run.
namespace stream {
inline constexpr std::uint64_t kCvSplit = 1;
inline constexpr std::uint64_t kEpochShuffle = 2;
inline constexpr std::uint64_t kRoutes = 3;
inline constexpr std::uint64_t kWeightInit = 4;
inline constexpr std::uint64_t kTaskParams = 5;
inline constexpr std::uint64_t kTaskFrames = 6;
inline constexpr std::uint64_t kBump = 7;
inline constexpr std::uint64_t kMixtureAssign = 8;
inline constexpr std::uint64_t kMixtureA = 9;
inline constexpr std::uint64_t kMixtureB = 10;
inline constexpr std::uint64_t kCorrupt = 11;
inline constexpr std::uint64_t kGradcheck = 12;
inline constexpr std::uint64_t kSession = 13;
}  // namespace stream

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace lhuc

#endif  // LHUC_CORE_RNG_HPP_
