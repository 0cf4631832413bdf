// Copyright 2026 The vicomp Authors. All Rights Reserved.
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
// =============================================================================

#ifndef VICOMP_RNG_H_
#define VICOMP_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace vicomp {

// All randomness flows through explicitly seeded 64-bit Mersenne Twister
// streams. The mapping from raw engine output to uniform/normal variates is
// done here rather than with <random> distributions, whose output differs
// between standard library implementations.
using Rng = std::mt19937_64;

// Stream tags used to derive independent, replayable sub-streams.
enum class Stream : std::uint64_t {
  kProblem = 1,
  kDeviceCompression = 2,
  kServerCompression = 3,
  kComponent = 4,
  kSharedCoin = 5,
  kParticipants = 6,
  kGapStarts = 7,
  kInitialPoint = 8,
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Hash of (seed, parts...) used to seed a sub-stream.
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> parts);

Rng make_stream(std::uint64_t seed, Stream tag,
                std::initializer_list<std::uint64_t> parts = {});

// Uniform on [0, 1) with 53 random bits.
double uniform01(Rng& rng);

// Uniform integer on {0, ..., n - 1}; n must be positive. Unbiased (rejection).
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

// Uniform on [lo, hi).
double uniform(Rng& rng, double lo, double hi);

// Standard normal via Box-Muller (one variate per call).
double standard_normal(Rng& rng);

}  // namespace vicomp

#endif  // VICOMP_RNG_H_
