/*
 * Copyright 2026 the paratune authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace paratune {

/// Seeded random stream used throughout the library. All draws go through
/// the helpers below instead of std:: distributions, so identical seeds give
/// identical samples regardless of standard-library implementation.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53-bit resolution.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Rejection sampling, no modulo bias. n must be
/// positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t bound = max - max % n;
  std::uint64_t draw = rng();
  while (draw >= bound) {
    draw = rng();
  }
  return draw % n;
}

}  // namespace paratune
