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

#include "paratune/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "paratune/gp.hpp"
#include "paratune/random.hpp"

namespace paratune {
namespace {

bool improves(Direction direction, double candidate, double incumbent) {
  return direction == Direction::kMinimize ? candidate < incumbent
                                           : candidate > incumbent;
}

TuneResult snapshot(const TrialHistory& history, std::size_t iterations_run,
                    const TuneDiagnostics& diagnostics) {
  TuneResult result;
  result.history = history;
  result.iterations_run = iterations_run;
  result.evaluations_completed = history.size();
  result.diagnostics = diagnostics;
  if (!history.empty()) {
    result.best_config = history.best_config();
    result.best_value = history.best_value();
  }
  return result;
}

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
  if (name == "hallucination") {
    return Algorithm::kHallucination;
  }
  if (name == "clustering") {
    return Algorithm::kClustering;
  }
  if (name == "random") {
    return Algorithm::kRandom;
  }
  throw ValidationError("unknown algorithm '" + std::string(name) +
                        "' (expected hallucination, clustering, or random)");
}

Direction parse_direction(std::string_view name) {
  if (name == "minimize") {
    return Direction::kMinimize;
  }
  if (name == "maximize") {
    return Direction::kMaximize;
  }
  throw ValidationError("unknown direction '" + std::string(name) +
                        "' (expected minimize or maximize)");
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kHallucination:
      return "hallucination";
    case Algorithm::kClustering:
      return "clustering";
    case Algorithm::kRandom:
      return "random";
  }
  return "unknown";
}

std::string to_string(Direction direction) {
  return direction == Direction::kMinimize ? "minimize" : "maximize";
}

std::size_t TunerConfig::resolved_initial_random() const {
  return initial_random.value_or(std::max<std::size_t>(2, batch_size));
}

std::size_t TunerConfig::resolved_mc_budget(const SearchSpace& space) const {
  return mc_budget.value_or(default_mc_budget(space));
}

void TunerConfig::validate() const {
  if (batch_size < 1) {
    throw ValidationError("batch_size must be at least 1");
  }
  if (initial_random.has_value() && *initial_random < 1) {
    throw ValidationError("initial_random must be at least 1");
  }
  if (mc_budget.has_value() && *mc_budget < 2) {
    throw ValidationError("mc_budget must be at least 2");
  }
}

const Configuration& TrialHistory::best_config() const {
  if (best_index_ < 0) {
    throw std::logic_error("no evaluations recorded yet");
  }
  return records_[static_cast<std::size_t>(best_index_)].config;
}

double TrialHistory::best_value() const {
  if (best_index_ < 0) {
    throw std::logic_error("no evaluations recorded yet");
  }
  return records_[static_cast<std::size_t>(best_index_)].value;
}

void TrialHistory::append(TrialRecord record) {
  if (best_index_ < 0 ||
      improves(direction_, record.value,
               records_[static_cast<std::size_t>(best_index_)].value)) {
    best_index_ = static_cast<std::ptrdiff_t>(records_.size());
  }
  records_.push_back(std::move(record));
}

IncorporationStats incorporate_results(TrialHistory& history,
                                       const BatchProposal& proposed,
                                       const std::vector<EvalResult>& returned,
                                       std::size_t iteration) {
  IncorporationStats stats;
  for (const auto& result : returned) {
    const bool member =
        std::find(proposed.configs.begin(), proposed.configs.end(),
                  result.config) != proposed.configs.end();
    if (!member) {
      throw ValidationError("result for " + to_string(result.config) +
                            " does not match any proposed configuration");
    }
    if (!std::isfinite(result.value)) {
      ++stats.dropped_nonfinite;
      continue;
    }
    history.append({result.config, result.value, iteration});
    ++stats.accepted;
  }
  return stats;
}

std::vector<double> best_so_far_series(const TrialHistory& history) {
  if (history.empty()) {
    throw std::invalid_argument("history holds no evaluations");
  }
  std::vector<double> series;
  series.reserve(history.size());
  double best = history.records().front().value;
  for (const auto& record : history.records()) {
    if (improves(history.direction(), record.value, best)) {
      best = record.value;
    }
    series.push_back(best);
  }
  return series;
}

std::vector<double> best_by_iteration(const TrialHistory& history) {
  if (history.empty()) {
    throw std::invalid_argument("history holds no evaluations");
  }
  std::size_t max_iteration = 0;
  for (const auto& record : history.records()) {
    max_iteration = std::max(max_iteration, record.iteration);
  }
  std::vector<double> series(max_iteration + 1,
                             std::numeric_limits<double>::quiet_NaN());
  double best = history.records().front().value;
  bool seen = false;
  for (const auto& record : history.records()) {
    if (!seen || improves(history.direction(), record.value, best)) {
      best = record.value;
      seen = true;
    }
    series[record.iteration] = best;
  }
  // An iteration with no accepted results inherits its predecessor's best.
  // (Records arrive grouped by iteration, so later groups already fold in
  // earlier improvements.)
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (std::isnan(series[i])) {
      series[i] = series[i - 1];
    }
  }
  return series;
}

TuneResult tune(const SearchSpace& space, const TunerConfig& config,
                Scheduler& scheduler) {
  config.validate();
  if (space.empty()) {
    throw ValidationError("search space has no parameters");
  }

  Rng rng(config.seed);
  const std::size_t mc_budget = config.resolved_mc_budget(space);
  TrialHistory history(config.direction);
  TuneDiagnostics diagnostics;
  const double sign = config.direction == Direction::kMinimize ? -1.0 : 1.0;

  // Dispatches one proposal; on an empty outcome retries once with a fresh
  // proposal from `propose`; aborts after two consecutive empty outcomes.
  auto run_batch = [&](std::size_t iteration, auto&& propose) {
    for (int attempt = 0;; ++attempt) {
      const BatchProposal proposal = propose();
      if (proposal.truncated) {
        ++diagnostics.truncated_proposals;
      }
      std::size_t accepted = 0;
      if (!proposal.configs.empty()) {
        diagnostics.evaluations_dispatched += proposal.configs.size();
        const std::vector<EvalResult> returned =
            scheduler.evaluate(proposal.configs);
        const IncorporationStats stats =
            incorporate_results(history, proposal, returned, iteration);
        diagnostics.results_accepted += stats.accepted;
        diagnostics.nonfinite_dropped += stats.dropped_nonfinite;
        accepted = stats.accepted;
      }
      if (accepted > 0) {
        return;
      }
      if (attempt > 0) {
        throw TunerAbort(
            "two consecutive batches produced no results (iteration " +
                std::to_string(iteration) + ")",
            snapshot(history, iteration, diagnostics));
      }
      ++diagnostics.empty_batch_retries;
    }
  };

  run_batch(0, [&] {
    return propose_batch_random(space, config.resolved_initial_random(), rng);
  });

  for (std::size_t t = 1; t <= config.max_iterations; ++t) {
    if (config.algorithm == Algorithm::kRandom) {
      run_batch(t, [&] {
        return propose_batch_random(space, config.batch_size, rng);
      });
      continue;
    }

    const auto& records = history.records();
    Eigen::MatrixXd X(static_cast<Eigen::Index>(records.size()),
                      static_cast<Eigen::Index>(space.encoded_dimension()));
    Eigen::VectorXd y(static_cast<Eigen::Index>(records.size()));
    for (std::size_t i = 0; i < records.size(); ++i) {
      X.row(static_cast<Eigen::Index>(i)) =
          encode(space, records[i].config).transpose();
      y[static_cast<Eigen::Index>(i)] = sign * records[i].value;
    }
    GaussianProcess gp(select_kernel_params(X, y));
    gp.fit(X, y);

    const AcquisitionParams acquisition{
        beta_schedule(t, mc_budget, config.batch_size), mc_budget};
    run_batch(t, [&] {
      return config.algorithm == Algorithm::kHallucination
                 ? propose_batch_hallucination(gp, space, config.batch_size,
                                               acquisition, rng)
                 : propose_batch_clustering(gp, space, config.batch_size,
                                            acquisition, rng);
    });
  }

  return snapshot(history, config.max_iterations, diagnostics);
}

}  // namespace paratune
