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

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "paratune/gp.hpp"
#include "paratune/random.hpp"
#include "paratune/search_space.hpp"

namespace paratune {

/// Raised when a proposal cannot find a candidate distinct from the points
/// it must avoid (only possible in tiny discrete spaces).
class ExhaustedSpaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exploration weight and sampling effort for one proposal round.
struct AcquisitionParams {
  double beta = 0.0;         // >= 0
  std::size_t mc_budget = 2000;  // >= 2
};

/// Two encoded points count as the same candidate when their Euclidean
/// distance is at most this; batches must be pairwise farther apart.
inline constexpr double kDistinctTolerance = 1e-9;

/// mean + sqrt(beta) * sqrt(variance). Requires variance >= 0, beta >= 0.
double ucb_score(double mean, double variance, double beta);

/// Exploration schedule for batch iteration t >= 1:
///   beta_t = 2 * ln(mc_budget * (t * batch_size)^2 * pi^2 / (6 * 0.1)).
/// Monotone non-decreasing in every argument.
double beta_schedule(std::size_t t, std::size_t mc_budget,
                     std::size_t batch_size);

/// One scored proposal.
struct Candidate {
  Configuration config;
  EncodedPoint encoded;
  double score = 0.0;
};

/// A proposed batch. `truncated` marks a batch that came back smaller than
/// requested because the space ran out of distinct points (random strategy
/// only; the model-based strategies throw instead).
struct BatchProposal {
  std::vector<Configuration> configs;
  std::vector<EncodedPoint> encoded;
  std::vector<double> scores;
  bool truncated = false;

  std::size_t size() const { return configs.size(); }
};

/// Draws params.mc_budget configurations, scores each with the UCB of the
/// process posterior, and returns the best-scoring sample farther than
/// kDistinctTolerance from every member of `exclude`. Score ties go to the
/// earlier sample. Throws ExhaustedSpaceError when every sample is excluded.
Candidate argmax_mc(const GaussianProcess& gp, const SearchSpace& space,
                    const AcquisitionParams& params, Rng& rng,
                    const std::vector<EncodedPoint>& exclude = {});

/// Sequential batch selection with hallucinated updates: picks the UCB
/// argmax, pretends it was observed at its posterior mean (shrinking nearby
/// variance, leaving the mean untouched), and repeats k times. Earlier picks
/// are excluded from later rounds. The caller's process is not modified.
BatchProposal propose_batch_hallucination(const GaussianProcess& gp,
                                          const SearchSpace& space,
                                          std::size_t k,
                                          const AcquisitionParams& params,
                                          Rng& rng);

/// Diversity through clustering: draws mc_budget samples, keeps the
/// top-scoring fifth (expanding to half, then all, until at least 2k points
/// are kept), partitions the kept points with k-means (k clusters, 10
/// iterations, k-means++-style seeding from rng), and takes the best-scoring
/// member of each non-empty cluster. Missing slots are filled with the
/// best-scoring unused kept points. With k = 1 this reduces to the global
/// argmax over the sample set.
BatchProposal propose_batch_clustering(const GaussianProcess& gp,
                                       const SearchSpace& space, std::size_t k,
                                       const AcquisitionParams& params,
                                       Rng& rng);

/// k random configurations with pairwise-distinct encodings; duplicates are
/// resampled up to 100 times before the batch is returned short with
/// `truncated` set. Scores are all zero.
BatchProposal propose_batch_random(const SearchSpace& space, std::size_t k,
                                   Rng& rng);

}  // namespace paratune
