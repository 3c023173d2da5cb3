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
#include <vector>

#include <doctest.h>

#include "support.hpp"

using namespace paratune;

namespace {

SearchSpace square_space() {
  SearchSpace space;
  space.add("x", Continuous{DistKind::kUniform, -1.0, 2.0});
  return space;
}

double square_objective(const Configuration& config) {
  const double x = std::get<double>(config.values.at("x"));
  return x * x;
}

// Scriptable scheduler: applies an objective, then lets the test reorder or
// drop results per call before handing them back.
class ScriptedScheduler : public Scheduler {
 public:
  using Mutator = std::function<void(std::vector<EvalResult>&)>;

  ScriptedScheduler(Objective objective, Mutator mutate = {})
      : objective_(std::move(objective)), mutate_(std::move(mutate)) {}

  std::vector<EvalResult> evaluate(
      const std::vector<Configuration>& batch) override {
    ++calls;
    std::vector<EvalResult> results;
    results.reserve(batch.size());
    for (const auto& config : batch) {
      results.push_back({config, objective_(config)});
    }
    if (mutate_) {
      mutate_(results);
    }
    return results;
  }

  int calls = 0;

 private:
  Objective objective_;
  Mutator mutate_;
};

BatchProposal proposal_of(const SearchSpace& space,
                          const std::vector<Configuration>& configs) {
  BatchProposal proposal;
  proposal.configs = configs;
  for (const auto& config : configs) {
    proposal.encoded.push_back(encode(space, config));
    proposal.scores.push_back(0.0);
  }
  return proposal;
}

Configuration point(double x) {
  Configuration config;
  config.values["x"] = x;
  return config;
}

}  // namespace

TEST_CASE("algorithm and direction names round-trip") {
  for (auto algorithm : {Algorithm::kHallucination, Algorithm::kClustering,
                         Algorithm::kRandom}) {
    CHECK(parse_algorithm(to_string(algorithm)) == algorithm);
  }
  CHECK(parse_algorithm("hallucination") == Algorithm::kHallucination);
  CHECK(parse_algorithm("clustering") == Algorithm::kClustering);
  CHECK(parse_algorithm("random") == Algorithm::kRandom);
  CHECK_THROWS_AS(parse_algorithm("annealing"), ValidationError);

  CHECK(parse_direction("minimize") == Direction::kMinimize);
  CHECK(parse_direction("maximize") == Direction::kMaximize);
  CHECK_THROWS_AS(parse_direction("sideways"), ValidationError);
}

TEST_CASE("config defaults derive from batch size and space") {
  TunerConfig config;
  CHECK(config.resolved_initial_random() == 2);
  config.batch_size = 7;
  CHECK(config.resolved_initial_random() == 7);
  config.initial_random = 3;
  CHECK(config.resolved_initial_random() == 3);

  const SearchSpace space = square_space();
  CHECK(config.resolved_mc_budget(space) == default_mc_budget(space));
  config.mc_budget = 555;
  CHECK(config.resolved_mc_budget(space) == 555);
}

TEST_CASE("config validation rejects out-of-range fields") {
  TunerConfig config;
  CHECK_NOTHROW(config.validate());
  config.batch_size = 0;
  CHECK_THROWS_AS(config.validate(), ValidationError);
  config.batch_size = 1;
  config.initial_random = 0;
  CHECK_THROWS_AS(config.validate(), ValidationError);
  config.initial_random = 2;
  config.mc_budget = 1;
  CHECK_THROWS_AS(config.validate(), ValidationError);
}

TEST_CASE("history tracks the earliest best under each direction") {
  TrialHistory minimize(Direction::kMinimize);
  minimize.append({point(1.0), 5.0, 0});
  minimize.append({point(2.0), 3.0, 0});
  minimize.append({point(3.0), 3.0, 1});  // tie: earlier record stays best
  minimize.append({point(4.0), 4.0, 1});
  CHECK(minimize.best_value() == 3.0);
  CHECK(std::get<double>(minimize.best_config().values.at("x")) == 2.0);

  TrialHistory maximize(Direction::kMaximize);
  maximize.append({point(1.0), 5.0, 0});
  maximize.append({point(2.0), 8.0, 0});
  maximize.append({point(3.0), 8.0, 1});
  CHECK(maximize.best_value() == 8.0);
  CHECK(std::get<double>(maximize.best_config().values.at("x")) == 2.0);

  TrialHistory empty;
  CHECK_THROWS_AS(empty.best_value(), std::logic_error);
  CHECK_THROWS_AS(empty.best_config(), std::logic_error);
}

TEST_CASE("incorporation accepts subsets in any order") {
  const SearchSpace space = square_space();
  const auto proposal = proposal_of(
      space, {point(0.1), point(0.2), point(0.3), point(0.4), point(0.5)});

  TrialHistory history;
  const std::vector<EvalResult> returned = {
      {point(0.4), 16.0}, {point(0.1), 1.0}, {point(0.3), 9.0}};
  const IncorporationStats stats =
      incorporate_results(history, proposal, returned, 2);
  CHECK(stats.accepted == 3);
  CHECK(stats.dropped_nonfinite == 0);
  REQUIRE(history.size() == 3);
  CHECK(history.records()[0].value == 16.0);
  CHECK(history.records()[1].value == 1.0);
  for (const auto& record : history.records()) {
    CHECK(record.iteration == 2);
  }
  CHECK(history.best_value() == 1.0);
}

TEST_CASE("incorporation drops non-finite values and counts them") {
  const SearchSpace space = square_space();
  const auto proposal = proposal_of(space, {point(0.1), point(0.2)});
  TrialHistory history;
  const std::vector<EvalResult> returned = {
      {point(0.1), std::numeric_limits<double>::quiet_NaN()},
      {point(0.2), 4.0},
  };
  const IncorporationStats stats =
      incorporate_results(history, proposal, returned, 1);
  CHECK(stats.accepted == 1);
  CHECK(stats.dropped_nonfinite == 1);
  CHECK(history.size() == 1);
  CHECK(history.records()[0].value == 4.0);
}

TEST_CASE("incorporation rejects results for configurations never proposed") {
  const SearchSpace space = square_space();
  const auto proposal = proposal_of(space, {point(0.1), point(0.2)});
  TrialHistory history;
  const std::vector<EvalResult> returned = {{point(0.9), 0.81}};
  CHECK_THROWS_WITH_AS(incorporate_results(history, proposal, returned, 1),
                       doctest::Contains("0.9"), ValidationError);
  CHECK(history.empty());

  CHECK(incorporate_results(history, proposal, {}, 1).accepted == 0);
  CHECK(history.empty());
}

TEST_CASE("running best series follows the direction") {
  TrialHistory minimize(Direction::kMinimize);
  minimize.append({point(1.0), 3.0, 0});
  minimize.append({point(2.0), 1.0, 1});
  minimize.append({point(3.0), 2.0, 2});
  CHECK(best_so_far_series(minimize) == std::vector<double>{3.0, 1.0, 1.0});

  TrialHistory single(Direction::kMinimize);
  single.append({point(1.0), 42.0, 0});
  CHECK(best_so_far_series(single) == std::vector<double>{42.0});

  TrialHistory maximize(Direction::kMaximize);
  maximize.append({point(1.0), 0.1, 0});
  maximize.append({point(2.0), 0.5, 1});
  maximize.append({point(3.0), 0.4, 2});
  CHECK(best_so_far_series(maximize) == std::vector<double>{0.1, 0.5, 0.5});

  TrialHistory empty;
  CHECK_THROWS_AS(best_so_far_series(empty), std::invalid_argument);
  CHECK_THROWS_AS(best_by_iteration(empty), std::invalid_argument);
}

TEST_CASE("per-iteration best carries through empty iterations") {
  TrialHistory history(Direction::kMinimize);
  history.append({point(1.0), 5.0, 0});
  history.append({point(2.0), 4.0, 0});
  // iteration 1 accepted nothing
  history.append({point(3.0), 6.0, 2});
  history.append({point(4.0), 1.5, 4});
  const std::vector<double> series = best_by_iteration(history);
  CHECK(series == std::vector<double>{4.0, 4.0, 4.0, 4.0, 1.5});
}

TEST_CASE("zero iterations run only the initial design") {
  const SearchSpace space = square_space();
  TunerConfig config;
  config.max_iterations = 0;
  config.initial_random = 6;
  config.seed = 1;
  ScriptedScheduler scheduler(square_objective);
  const TuneResult result = tune(space, config, scheduler);
  CHECK(result.iterations_run == 0);
  CHECK(result.evaluations_completed == 6);
  CHECK(result.history.size() == 6);
  CHECK(scheduler.calls == 1);
  for (const auto& record : result.history.records()) {
    CHECK(record.iteration == 0);
  }
  REQUIRE(result.best_value.has_value());
  CHECK(*result.best_value == result.history.best_value());
}

TEST_CASE("the random algorithm replays the proposal stream") {
  // With a reliable scheduler the whole run must equal: initial design, then
  // max_iterations random batches, all drawn from one generator seeded as the
  // tuner seeds it.
  const SearchSpace space = square_space();
  TunerConfig config;
  config.algorithm = Algorithm::kRandom;
  config.batch_size = 3;
  config.max_iterations = 4;
  config.initial_random = 5;
  config.seed = 97;
  ScriptedScheduler scheduler(square_objective);
  const TuneResult result = tune(space, config, scheduler);

  CHECK(result.evaluations_completed == 5 + 4 * 3);
  REQUIRE(result.history.size() == 17);

  Rng replay(97);
  std::vector<Configuration> expected;
  for (const auto& config_drawn : sample_configurations(space, 5, replay)) {
    expected.push_back(config_drawn);
  }
  for (int iteration = 0; iteration < 4; ++iteration) {
    const BatchProposal batch = propose_batch_random(space, 3, replay);
    expected.insert(expected.end(), batch.configs.begin(),
                    batch.configs.end());
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(result.history.records()[i].config == expected[i]);
  }
}

TEST_CASE("identical runs produce identical histories") {
  const SearchSpace space = square_space();
  for (auto algorithm : {Algorithm::kHallucination, Algorithm::kClustering,
                         Algorithm::kRandom}) {
    TunerConfig config;
    config.algorithm = algorithm;
    config.batch_size = 2;
    config.max_iterations = 3;
    config.initial_random = 4;
    config.mc_budget = 200;
    config.seed = 5;

    ScriptedScheduler first(square_objective);
    ScriptedScheduler second(square_objective);
    const TuneResult a = tune(space, config, first);
    const TuneResult b = tune(space, config, second);

    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
      CHECK(a.history.records()[i].config == b.history.records()[i].config);
      CHECK(a.history.records()[i].value == b.history.records()[i].value);
    }
    CHECK(a.best_value == b.best_value);
  }
}

TEST_CASE("minimizing f equals maximizing -f") {
  const SearchSpace space = square_space();
  TunerConfig config;
  config.algorithm = Algorithm::kHallucination;
  config.batch_size = 2;
  config.max_iterations = 4;
  config.initial_random = 4;
  config.mc_budget = 300;
  config.seed = 11;

  ScriptedScheduler minimizing(square_objective);
  const TuneResult low = tune(space, config, minimizing);

  config.direction = Direction::kMaximize;
  ScriptedScheduler maximizing(
      [](const Configuration& c) { return -square_objective(c); });
  const TuneResult high = tune(space, config, maximizing);

  REQUIRE(low.history.size() == high.history.size());
  for (std::size_t i = 0; i < low.history.size(); ++i) {
    CHECK(low.history.records()[i].config ==
          high.history.records()[i].config);
    CHECK(low.history.records()[i].value ==
          doctest::Approx(-high.history.records()[i].value).epsilon(1e-15));
  }
  REQUIRE(low.best_value.has_value());
  REQUIRE(high.best_value.has_value());
  CHECK(*low.best_value == doctest::Approx(-*high.best_value).epsilon(1e-15));
  CHECK(low.best_config == high.best_config);
}

TEST_CASE("a reliable scheduler consumes the exact evaluation budget") {
  const SearchSpace space = square_space();
  for (auto algorithm : {Algorithm::kHallucination, Algorithm::kClustering,
                         Algorithm::kRandom}) {
    TunerConfig config;
    config.algorithm = algorithm;
    config.batch_size = 3;
    config.max_iterations = 5;
    config.initial_random = 4;
    config.mc_budget = 200;
    config.seed = 2;
    ScriptedScheduler scheduler(square_objective);
    const TuneResult result = tune(space, config, scheduler);
    CHECK(result.evaluations_completed == 4 + 5 * 3);
    CHECK(result.iterations_run == 5);
    CHECK(result.diagnostics.evaluations_dispatched == 19);
    CHECK(result.diagnostics.results_accepted == 19);
    CHECK(result.diagnostics.empty_batch_retries == 0);
  }
}

TEST_CASE("shuffled and partially dropped results never corrupt the history") {
  const SearchSpace space = square_space();
  Rng chaos(314);
  ScriptedScheduler scheduler(square_objective,
                              [&chaos](std::vector<EvalResult>& results) {
                                // Shuffle.
                                for (std::size_t i = results.size(); i > 1;
                                     --i) {
                                  std::swap(results[i - 1],
                                            results[uniform_below(chaos, i)]);
                                }
                                // Drop a suffix half of the time.
                                if (!results.empty() &&
                                    uniform_unit(chaos) < 0.5) {
                                  results.pop_back();
                                }
                              });

  TunerConfig config;
  config.algorithm = Algorithm::kHallucination;
  config.batch_size = 3;
  config.max_iterations = 6;
  config.initial_random = 4;
  config.mc_budget = 150;
  config.seed = 8;
  const TuneResult result = tune(space, config, scheduler);

  CHECK(result.history.size() >= 1);
  CHECK(result.evaluations_completed == result.history.size());
  CHECK(result.evaluations_completed <= 4 + 6 * 3);
  for (const auto& record : result.history.records()) {
    // Every accepted value must still belong to its configuration.
    CHECK(record.value == square_objective(record.config));
  }
  REQUIRE(result.best_value.has_value());
  const auto series = best_so_far_series(result.history);
  CHECK(std::is_sorted(series.begin(), series.end(), std::greater<double>()));
  CHECK(*result.best_value == series.back());
}

TEST_CASE("result order within a batch does not change the surrogate") {
  // Feed one batch through incorporate_results twice, forward and reversed;
  // the surrogate fitted from the two histories must agree.
  const SearchSpace space = square_space();
  const auto proposal = proposal_of(
      space, {point(-0.5), point(0.25), point(0.75), point(0.9)});
  std::vector<EvalResult> forward;
  for (const auto& config : proposal.configs) {
    forward.push_back({config, square_objective(config)});
  }
  std::vector<EvalResult> reversed(forward.rbegin(), forward.rend());

  const auto fit_from = [&](const std::vector<EvalResult>& results) {
    TrialHistory history;
    incorporate_results(history, proposal, results, 0);
    Eigen::MatrixXd X(history.size(), space.encoded_dimension());
    Eigen::VectorXd y(history.size());
    for (std::size_t i = 0; i < history.size(); ++i) {
      X.row(Eigen::Index(i)) = encode(space, history.records()[i].config);
      y[Eigen::Index(i)] = -history.records()[i].value;
    }
    GaussianProcess gp(select_kernel_params(X, y));
    gp.fit(X, y);
    return gp;
  };

  const GaussianProcess a = fit_from(forward);
  const GaussianProcess b = fit_from(reversed);
  Rng rng(6);
  for (int probe = 0; probe < 25; ++probe) {
    Eigen::VectorXd x(1);
    x << uniform_unit(rng);
    CHECK(std::abs(a.posterior(x).mean - b.posterior(x).mean) < 1e-8);
    CHECK(std::abs(a.posterior(x).variance - b.posterior(x).variance) < 1e-8);
  }
}

TEST_CASE("one empty dispatch is retried, two abort with the partial result") {
  const SearchSpace space = square_space();
  TunerConfig config;
  config.algorithm = Algorithm::kRandom;
  config.batch_size = 2;
  config.max_iterations = 3;
  config.initial_random = 3;
  config.seed = 4;

  SUBCASE("single failure recovers") {
    int failures_left = 1;
    ScriptedScheduler scheduler(square_objective,
                                [&](std::vector<EvalResult>& results) {
                                  if (results.empty()) {
                                    return;
                                  }
                                  // Fail exactly one post-initial dispatch.
                                  if (results[0].config.values.count("x") &&
                                      failures_left > 0 &&
                                      results.size() == 2) {
                                    results.clear();
                                    --failures_left;
                                  }
                                });
    const TuneResult result = tune(space, config, scheduler);
    CHECK(result.diagnostics.empty_batch_retries == 1);
    CHECK(result.iterations_run == 3);
    CHECK(result.evaluations_completed == 3 + 3 * 2);
  }

  SUBCASE("consecutive failures abort and surface progress") {
    ScriptedScheduler scheduler(square_objective,
                                [](std::vector<EvalResult>& results) {
                                  if (results.size() == 2) {
                                    results.clear();  // every proposed batch
                                  }
                                });
    try {
      tune(space, config, scheduler);
      FAIL("expected TunerAbort");
    } catch (const TunerAbort& abort) {
      const TuneResult& partial = abort.partial();
      CHECK(partial.history.size() == 3);  // the initial design survived
      REQUIRE(partial.best_value.has_value());
      CHECK(partial.diagnostics.empty_batch_retries >= 1);
      for (const auto& record : partial.history.records()) {
        CHECK(record.value == square_objective(record.config));
      }
    }
  }
}
