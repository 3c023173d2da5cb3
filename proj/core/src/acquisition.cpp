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

#include "paratune/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace paratune {
namespace {

constexpr double kDistinctToleranceSq = kDistinctTolerance * kDistinctTolerance;

bool collides(const EncodedPoint& x, const std::vector<EncodedPoint>& others) {
  for (const auto& other : others) {
    if ((x - other).squaredNorm() <= kDistinctToleranceSq) {
      return true;
    }
  }
  return false;
}

struct ScoredSamples {
  std::vector<Configuration> configs;
  Eigen::MatrixXd encoded;      // one sample per row
  std::vector<double> scores;   // UCB per sample
};

ScoredSamples draw_and_score(const GaussianProcess& gp,
                             const SearchSpace& space,
                             const AcquisitionParams& params, Rng& rng) {
  ScoredSamples out;
  out.configs = sample_configurations(space, params.mc_budget, rng);
  out.encoded.resize(static_cast<Eigen::Index>(out.configs.size()),
                     static_cast<Eigen::Index>(space.encoded_dimension()));
  for (std::size_t i = 0; i < out.configs.size(); ++i) {
    out.encoded.row(static_cast<Eigen::Index>(i)) =
        encode(space, out.configs[i]).transpose();
  }
  Eigen::VectorXd mean, variance;
  gp.posterior(out.encoded, mean, variance);
  out.scores.resize(out.configs.size());
  for (std::size_t i = 0; i < out.configs.size(); ++i) {
    out.scores[i] = ucb_score(mean[static_cast<Eigen::Index>(i)],
                              variance[static_cast<Eigen::Index>(i)],
                              params.beta);
  }
  return out;
}

// Weighted pick proportional to weights; uniform fallback when all weights
// vanish (e.g. every remaining point coincides with a chosen center).
std::size_t pick_weighted(const std::vector<double>& weights, Rng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (total <= 0.0) {
    return uniform_below(rng, weights.size());
  }
  const double u = uniform_unit(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) {
      return i;
    }
  }
  return weights.size() - 1;
}

// k-means over the rows of `points`: k-means++-style seeding from rng, then
// a fixed number of Lloyd iterations. Returns one cluster index per row.
// Ties in the nearest-center decision go to the lowest center index; a
// cluster left empty keeps its previous center.
std::vector<std::size_t> kmeans_assign(const Eigen::MatrixXd& points,
                                       std::size_t k, Rng& rng) {
  const auto m = static_cast<std::size_t>(points.rows());
  constexpr int kLloydIterations = 10;

  Eigen::MatrixXd centers(static_cast<Eigen::Index>(k), points.cols());
  std::vector<double> dist_sq(m, std::numeric_limits<double>::infinity());
  centers.row(0) = points.row(
      static_cast<Eigen::Index>(uniform_below(rng, m)));
  for (std::size_t c = 1; c < k; ++c) {
    for (std::size_t i = 0; i < m; ++i) {
      const double d =
          (points.row(static_cast<Eigen::Index>(i)) - centers.row(c - 1))
              .squaredNorm();
      dist_sq[i] = std::min(dist_sq[i], d);
    }
    centers.row(static_cast<Eigen::Index>(c)) =
        points.row(static_cast<Eigen::Index>(pick_weighted(dist_sq, rng)));
  }

  std::vector<std::size_t> assignment(m, 0);
  for (int iter = 0; iter < kLloydIterations; ++iter) {
    for (std::size_t i = 0; i < m; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_c = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double d = (points.row(static_cast<Eigen::Index>(i)) -
                          centers.row(static_cast<Eigen::Index>(c)))
                             .squaredNorm();
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      assignment[i] = best_c;
    }
    for (std::size_t c = 0; c < k; ++c) {
      Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(points.cols());
      std::size_t count = 0;
      for (std::size_t i = 0; i < m; ++i) {
        if (assignment[i] == c) {
          sum += points.row(static_cast<Eigen::Index>(i));
          ++count;
        }
      }
      if (count > 0) {
        centers.row(static_cast<Eigen::Index>(c)) = sum / double(count);
      }
    }
  }
  return assignment;
}

}  // namespace

double ucb_score(double mean, double variance, double beta) {
  if (variance < 0.0 || beta < 0.0) {
    throw std::invalid_argument("ucb_score needs variance >= 0 and beta >= 0");
  }
  return mean + std::sqrt(beta) * std::sqrt(variance);
}

double beta_schedule(std::size_t t, std::size_t mc_budget,
                     std::size_t batch_size) {
  if (t == 0 || mc_budget == 0 || batch_size == 0) {
    throw std::invalid_argument("beta_schedule arguments must be positive");
  }
  constexpr double kDelta = 0.1;
  const double evals = double(t) * double(batch_size);
  const double pi_sq = std::numbers::pi * std::numbers::pi;
  return 2.0 *
         std::log(double(mc_budget) * evals * evals * pi_sq / (6.0 * kDelta));
}

Candidate argmax_mc(const GaussianProcess& gp, const SearchSpace& space,
                    const AcquisitionParams& params, Rng& rng,
                    const std::vector<EncodedPoint>& exclude) {
  const ScoredSamples samples = draw_and_score(gp, space, params, rng);

  std::ptrdiff_t best = -1;
  for (std::size_t i = 0; i < samples.configs.size(); ++i) {
    if (best >= 0 &&
        samples.scores[i] <= samples.scores[static_cast<std::size_t>(best)]) {
      continue;
    }
    if (collides(samples.encoded.row(static_cast<Eigen::Index>(i)), exclude)) {
      continue;
    }
    best = static_cast<std::ptrdiff_t>(i);
  }
  if (best < 0) {
    throw ExhaustedSpaceError(
        "all sampled candidates fall within the exclusion tolerance of "
        "already-selected points");
  }
  Candidate winner;
  winner.config = samples.configs[static_cast<std::size_t>(best)];
  winner.encoded = samples.encoded.row(static_cast<Eigen::Index>(best));
  winner.score = samples.scores[static_cast<std::size_t>(best)];
  return winner;
}

BatchProposal propose_batch_hallucination(const GaussianProcess& gp,
                                          const SearchSpace& space,
                                          std::size_t k,
                                          const AcquisitionParams& params,
                                          Rng& rng) {
  GaussianProcess scratch = gp;
  BatchProposal batch;
  for (std::size_t j = 0; j < k; ++j) {
    Candidate pick = argmax_mc(scratch, space, params, rng, batch.encoded);
    batch.configs.push_back(std::move(pick.config));
    batch.encoded.push_back(pick.encoded);
    batch.scores.push_back(pick.score);
    if (j + 1 < k) {
      scratch.add_hallucinated(pick.encoded);
    }
  }
  return batch;
}

BatchProposal propose_batch_clustering(const GaussianProcess& gp,
                                       const SearchSpace& space, std::size_t k,
                                       const AcquisitionParams& params,
                                       Rng& rng) {
  const ScoredSamples samples = draw_and_score(gp, space, params, rng);
  const std::size_t n = samples.configs.size();

  // Sample indices from best score to worst; the stable sort keeps equal
  // scores in sample order, preserving the earliest-sample tie rule.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return samples.scores[a] > samples.scores[b];
                   });

  std::size_t kept_count = n / 5;
  if (kept_count < 2 * k) {
    kept_count = n / 2;
  }
  if (kept_count < 2 * k) {
    kept_count = n;
  }
  const std::vector<std::size_t> kept(order.begin(),
                                      order.begin() +
                                          static_cast<std::ptrdiff_t>(kept_count));

  Eigen::MatrixXd kept_points(static_cast<Eigen::Index>(kept.size()),
                              samples.encoded.cols());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    kept_points.row(static_cast<Eigen::Index>(i)) =
        samples.encoded.row(static_cast<Eigen::Index>(kept[i]));
  }
  const std::vector<std::size_t> assignment = kmeans_assign(kept_points, k, rng);

  BatchProposal batch;
  std::vector<bool> used(kept.size(), false);
  auto push_kept = [&](std::size_t kept_index) {
    const std::size_t sample_index = kept[kept_index];
    batch.configs.push_back(samples.configs[sample_index]);
    batch.encoded.push_back(
        samples.encoded.row(static_cast<Eigen::Index>(sample_index)));
    batch.scores.push_back(samples.scores[sample_index]);
    used[kept_index] = true;
  };

  // Best member per non-empty cluster. kept is score-ordered, so the first
  // member seen per cluster is its best (ties resolved to earliest sample).
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (assignment[i] != c) {
        continue;
      }
      if (!collides(kept_points.row(static_cast<Eigen::Index>(i)),
                    batch.encoded)) {
        push_kept(i);
      }
      break;  // later members of this cluster score no higher
    }
  }

  // Fill remaining slots with the best unused kept points.
  for (std::size_t i = 0; i < kept.size() && batch.size() < k; ++i) {
    if (used[i] ||
        collides(kept_points.row(static_cast<Eigen::Index>(i)),
                 batch.encoded)) {
      continue;
    }
    push_kept(i);
  }
  if (batch.size() < k) {
    throw ExhaustedSpaceError(
        "sample set holds fewer than the requested number of distinct "
        "candidates");
  }
  return batch;
}

BatchProposal propose_batch_random(const SearchSpace& space, std::size_t k,
                                   Rng& rng) {
  constexpr int kResampleAttempts = 100;
  BatchProposal batch;
  for (std::size_t j = 0; j < k; ++j) {
    bool placed = false;
    for (int attempt = 0; attempt < kResampleAttempts; ++attempt) {
      Configuration config =
          std::move(sample_configurations(space, 1, rng).front());
      EncodedPoint point = encode(space, config);
      if (collides(point, batch.encoded)) {
        continue;
      }
      batch.configs.push_back(std::move(config));
      batch.encoded.push_back(std::move(point));
      batch.scores.push_back(0.0);
      placed = true;
      break;
    }
    if (!placed) {
      batch.truncated = true;
      break;
    }
  }
  return batch;
}

}  // namespace paratune
