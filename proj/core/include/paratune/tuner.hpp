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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "paratune/acquisition.hpp"
#include "paratune/scheduler.hpp"
#include "paratune/search_space.hpp"

namespace paratune {

enum class Algorithm { kHallucination, kClustering, kRandom };
enum class Direction { kMinimize, kMaximize };

Algorithm parse_algorithm(std::string_view name);
Direction parse_direction(std::string_view name);
std::string to_string(Algorithm algorithm);
std::string to_string(Direction direction);

/// Everything a tuning run is parameterized by. Optional fields fall back
/// to derived defaults: initial_random to max(2, batch_size), mc_budget to
/// the search-space heuristic.
struct TunerConfig {
  Algorithm algorithm = Algorithm::kHallucination;
  std::size_t batch_size = 1;
  std::size_t max_iterations = 20;  // batches after the initial design
  std::optional<std::size_t> initial_random;
  std::optional<std::size_t> mc_budget;
  std::uint64_t seed = 0;
  Direction direction = Direction::kMinimize;

  std::size_t resolved_initial_random() const;
  std::size_t resolved_mc_budget(const SearchSpace& space) const;

  /// Throws ValidationError when a field is out of range.
  void validate() const;
};

/// One accepted evaluation. iteration 0 is the initial random design;
/// iteration t >= 1 is the t-th proposed batch.
struct TrialRecord {
  Configuration config;
  double value = 0.0;
  std::size_t iteration = 0;
};

/// Append-only record of accepted evaluations plus the running best under a
/// fixed direction. Ties keep the earliest achiever.
class TrialHistory {
 public:
  explicit TrialHistory(Direction direction = Direction::kMinimize)
      : direction_(direction) {}

  Direction direction() const { return direction_; }
  const std::vector<TrialRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Throw std::logic_error when the history is empty.
  const Configuration& best_config() const;
  double best_value() const;

  /// Appends one record, updating the best. Exposed for result plumbing;
  /// tuning code goes through incorporate_results.
  void append(TrialRecord record);

 private:
  std::vector<TrialRecord> records_;
  std::ptrdiff_t best_index_ = -1;
  Direction direction_;
};

/// What incorporate_results did with a scheduler's answer.
struct IncorporationStats {
  std::size_t accepted = 0;
  std::size_t dropped_nonfinite = 0;
};

/// Folds a scheduler's (possibly partial, possibly reordered) results for
/// `proposed` into the history under the given iteration index. Results
/// whose configuration is not a member of the proposal are rejected with a
/// ValidationError naming the stray configuration; non-finite objective
/// values are dropped and counted. An empty result list is a no-op.
IncorporationStats incorporate_results(TrialHistory& history,
                                       const BatchProposal& proposed,
                                       const std::vector<EvalResult>& returned,
                                       std::size_t iteration);

/// Running best after each record, in acceptance order. Throws
/// std::invalid_argument on an empty history.
std::vector<double> best_so_far_series(const TrialHistory& history);

/// Running best at the end of each iteration 0..max recorded, carrying the
/// previous value through iterations that accepted nothing. Throws
/// std::invalid_argument on an empty history.
std::vector<double> best_by_iteration(const TrialHistory& history);

/// Bookkeeping for fault-tolerance visibility.
struct TuneDiagnostics {
  std::size_t evaluations_dispatched = 0;
  std::size_t results_accepted = 0;
  std::size_t nonfinite_dropped = 0;
  std::size_t empty_batch_retries = 0;
  std::size_t truncated_proposals = 0;
};

struct TuneResult {
  std::optional<Configuration> best_config;
  std::optional<double> best_value;
  TrialHistory history;
  std::size_t iterations_run = 0;
  std::size_t evaluations_completed = 0;
  TuneDiagnostics diagnostics;
};

/// Raised when two consecutive dispatches produce no results. Carries what
/// was learned before the failure.
class TunerAbort : public std::runtime_error {
 public:
  TunerAbort(const std::string& message, TuneResult partial)
      : std::runtime_error(message), partial_(std::move(partial)) {}

  const TuneResult& partial() const { return partial_; }

 private:
  TuneResult partial_;
};

/// Runs the full loop: an initial random design, then max_iterations rounds
/// of (kernel re-selection, surrogate refit on all accepted observations,
/// batch proposal by the configured algorithm, dispatch, incorporation).
/// Minimization negates targets internally; the surrogate always maximizes.
/// Deterministic given the seed and a deterministic scheduler. A dispatch
/// that yields nothing is retried once with a freshly proposed batch; two
/// empty dispatches in a row raise TunerAbort.
TuneResult tune(const SearchSpace& space, const TunerConfig& config,
                Scheduler& scheduler);

}  // namespace paratune
