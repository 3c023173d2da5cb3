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

// Generators shared between the property-style test suites.

#pragma once

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "paratune/random.hpp"
#include "paratune/search_space.hpp"

namespace paratune::testing {

inline double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

/// Standard normal draw (Box-Muller on the deterministic stream).
inline double normal_unit(Rng& rng) {
  double u1 = uniform_unit(rng);
  while (u1 <= 0.0) {
    u1 = uniform_unit(rng);
  }
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

struct SpaceOptions {
  std::size_t min_params = 1;
  std::size_t max_params = 5;
  bool categorical_only = false;
};

/// A random but always-valid search space mixing every domain kind.
inline SearchSpace random_space(Rng& rng, SpaceOptions options = {}) {
  SearchSpace space;
  const std::size_t count =
      options.min_params +
      uniform_below(rng, options.max_params - options.min_params + 1);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string name = "p" + std::to_string(i);
    const std::uint64_t kind =
        options.categorical_only ? 3 : uniform_below(rng, 4);
    switch (kind) {
      case 0: {
        const double loc = uniform_in(rng, -10.0, 10.0);
        space.add(name, Continuous{DistKind::kUniform, loc,
                                   uniform_in(rng, 0.1, 20.0)});
        break;
      }
      case 1: {
        const double loc = uniform_in(rng, -5.0, 2.0);
        space.add(name, Continuous{DistKind::kLogUniform, loc,
                                   uniform_in(rng, 0.5, 6.0)});
        break;
      }
      case 2: {
        const auto lo = static_cast<std::int64_t>(uniform_below(rng, 20)) - 10;
        const auto width = static_cast<std::int64_t>(uniform_below(rng, 12)) + 1;
        space.add(name, IntRange{lo, lo + width});
        break;
      }
      default: {
        Categorical cat;
        const std::uint64_t choices = 2 + uniform_below(rng, 4);
        for (std::uint64_t c = 0; c < choices; ++c) {
          cat.choices.push_back(std::string(1, static_cast<char>('a' + c)));
        }
        space.add(name, std::move(cat));
        break;
      }
    }
  }
  return space;
}

/// Random points on the unit cube, one per row.
inline Eigen::MatrixXd random_points(Rng& rng, std::size_t n, std::size_t d) {
  Eigen::MatrixXd X(n, d);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      X(i, j) = uniform_unit(rng);
    }
  }
  return X;
}

}  // namespace paratune::testing
