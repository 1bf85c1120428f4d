// Copyright 2026  The stutterkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace stutterkit {

// Seed mixing. All substream seeds in the toolkit are derived through these
// functions so results do not depend on the platform or on std:: distribution
// implementations.
std::uint64_t SplitMix64(std::uint64_t x);
std::uint64_t Fnv1a64(std::string_view bytes);
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index);
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view name);

// xoshiro256** seeded through SplitMix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t Next();

  // Uniform integer in the closed range [lo, hi]; unbiased (rejection).
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);

  // Uniform index in [0, n). n must be > 0.
  std::size_t UniformIndex(std::size_t n);

  // Uniform double in [0, 1) with 53 bits of mantissa.
  double UniformUnit();

  // Index drawn proportionally to non-negative weights (sum > 0).
  std::size_t Categorical(std::span<const double> weights);

 private:
  std::array<std::uint64_t, 4> state_;
};

}  // namespace stutterkit
