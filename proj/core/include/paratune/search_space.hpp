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

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "paratune/random.hpp"

namespace paratune {

/// A document that could not be parsed at all.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally valid input that violates a domain constraint.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class DistKind { kUniform, kLogUniform };

/// Continuous parameter in two-argument loc/scale form. Uniform draws from
/// [loc, loc + scale]. Loguniform draws 10^u with u uniform on
/// [loc, loc + scale], so values lie in [10^loc, 10^(loc + scale)].
/// scale must be positive and both fields finite.
struct Continuous {
  DistKind dist = DistKind::kUniform;
  double loc = 0.0;
  double scale = 1.0;

  /// Bounds of the value domain (not of the exponent).
  double lower() const;
  double upper() const;

  friend bool operator==(const Continuous&, const Continuous&) = default;
};

/// Integer parameter over the half-open range [lo, hi). Requires lo < hi.
struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 1;

  friend bool operator==(const IntRange&, const IntRange&) = default;
};

/// Categorical parameter over an ordered list of distinct strings.
struct Categorical {
  std::vector<std::string> choices;

  friend bool operator==(const Categorical&, const Categorical&) = default;
};

using ParameterDomain = std::variant<Continuous, IntRange, Categorical>;
using ParamValue = std::variant<double, std::int64_t, std::string>;

/// One concrete assignment of a value to every parameter of a search space.
/// Compared by exact field equality.
struct Configuration {
  std::map<std::string, ParamValue> values;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// Numeric image of a Configuration on the unit hypercube: one coordinate
/// per continuous or integer parameter, a one-hot block per categorical
/// parameter. Every coordinate lies in [0, 1].
using EncodedPoint = Eigen::VectorXd;

/// Ordered map from parameter name to domain. Iteration order is insertion
/// order and is load-bearing: it fixes the encoding layout and the order in
/// which samplers consume the random stream.
class SearchSpace {
 public:
  SearchSpace() = default;

  /// Adds a parameter. Throws ValidationError on an invalid domain, an empty
  /// name, or a duplicate name; the message names the offending parameter.
  void add(std::string name, ParameterDomain domain);

  const std::vector<std::pair<std::string, ParameterDomain>>& params() const {
    return params_;
  }
  std::size_t size() const { return params_.size(); }
  bool empty() const { return params_.empty(); }

  /// Dimension of the encoded representation: one per numeric parameter plus
  /// the number of choices per categorical parameter.
  std::size_t encoded_dimension() const;

  /// Checks that `config` assigns an in-domain value to exactly the
  /// parameters of this space. Throws ValidationError otherwise.
  void validate(const Configuration& config) const;

  friend bool operator==(const SearchSpace&, const SearchSpace&) = default;

 private:
  std::vector<std::pair<std::string, ParameterDomain>> params_;
};

/// Parses the space file format: a top-level JSON object mapping parameter
/// names to one of
///   {"dist": "uniform"|"loguniform", "loc": <num>, "scale": <num>}
///   {"range": [lo, hi]}
///   {"choices": ["a", "b", ...]}
/// Throws ParseError for malformed documents and ValidationError for
/// constraint violations; validation messages name the offending parameter.
SearchSpace parse_space(std::string_view text);

/// Inverse of parse_space. parse(serialize(s)) == s.
std::string serialize_space(const SearchSpace& space);

/// Draws n independent configurations. Uniform over [loc, loc+scale] for
/// uniform parameters, 10^u with u uniform for loguniform, uniform over
/// [lo, hi) for integer ranges, uniform over choices for categoricals.
/// Deterministic given the stream state.
std::vector<Configuration> sample_configurations(const SearchSpace& space,
                                                 std::size_t n, Rng& rng);

/// Maps a valid configuration onto the unit hypercube. Uniform dimensions
/// map affinely, loguniform via (log10(v) - loc) / scale, integer ranges via
/// (v - lo) / (hi - 1 - lo) (0 for single-value ranges), categoricals to a
/// one-hot block.
EncodedPoint encode(const SearchSpace& space, const Configuration& config);

/// Inverse of encode. Integer dimensions round to the nearest valid value;
/// categorical blocks take the argmax, lowest index on ties. Throws
/// ValidationError on an all-zero categorical block.
Configuration decode(const SearchSpace& space, const EncodedPoint& point);

/// Default Monte Carlo sample count for acquisition maximization over this
/// space: 1000 per encoded dimension, clamped to [2000, 20000].
std::size_t default_mc_budget(const SearchSpace& space);

/// Renders a value for error messages and summaries.
std::string to_string(const ParamValue& value);

/// "{a=1, b=2.5}" rendering for error messages and summaries.
std::string to_string(const Configuration& config);

}  // namespace paratune
