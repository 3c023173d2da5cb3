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

#include "paratune/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <doctest.h>

using namespace paratune;
using namespace std::chrono_literals;

namespace {

Configuration xpoint(double x) {
  Configuration config;
  config.values["x"] = x;
  return config;
}

double xvalue(const Configuration& config) {
  return std::get<double>(config.values.at("x"));
}

// Map result list to {x -> value} for order-free comparison.
std::map<double, double> by_input(const std::vector<EvalResult>& results) {
  std::map<double, double> mapped;
  for (const auto& result : results) {
    mapped[xvalue(result.config)] = result.value;
  }
  return mapped;
}

const std::string kToyWorker = TOY_WORKER_PATH;

}  // namespace

TEST_CASE("serial scheduler evaluates everything in order") {
  SerialScheduler scheduler([](const Configuration& c) {
    return xvalue(c) * 10.0;
  });
  const auto results =
      scheduler.evaluate({xpoint(1.0), xpoint(2.0), xpoint(3.0)});
  REQUIRE(results.size() == 3);
  CHECK(xvalue(results[0].config) == 1.0);
  CHECK(results[0].value == 10.0);
  CHECK(xvalue(results[1].config) == 2.0);
  CHECK(xvalue(results[2].config) == 3.0);
  CHECK(results[2].value == 30.0);

  CHECK(scheduler.evaluate({}).empty());
}

TEST_CASE("serial scheduler skips a throwing evaluation") {
  SerialScheduler scheduler([](const Configuration& c) -> double {
    if (xvalue(c) == 2.0) {
      throw std::runtime_error("boom");
    }
    return xvalue(c);
  });
  const auto results =
      scheduler.evaluate({xpoint(1.0), xpoint(2.0), xpoint(3.0)});
  REQUIRE(results.size() == 2);
  CHECK(xvalue(results[0].config) == 1.0);
  CHECK(xvalue(results[1].config) == 3.0);
}

TEST_CASE("serial scheduler stops starting work after the deadline") {
  SerialScheduler scheduler(
      [](const Configuration& c) {
        std::this_thread::sleep_for(120ms);
        return xvalue(c);
      },
      200ms);
  const auto start = std::chrono::steady_clock::now();
  const auto results = scheduler.evaluate(
      {xpoint(1.0), xpoint(2.0), xpoint(3.0), xpoint(4.0), xpoint(5.0)});
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(results.size() >= 1);
  CHECK(results.size() <= 2);  // 2 x 120ms crosses the 200ms deadline
  CHECK(elapsed < 1s);  // never ran the whole 600ms batch
}

TEST_CASE("pool scheduler matches serial results as a multiset") {
  const Objective objective = [](const Configuration& c) {
    return xvalue(c) * xvalue(c);
  };
  std::vector<Configuration> batch;
  for (int i = 0; i < 7; ++i) {
    batch.push_back(xpoint(double(i)));
  }
  SerialScheduler serial(objective);
  PoolScheduler pool(objective, 3);
  CHECK(by_input(serial.evaluate(batch)) == by_input(pool.evaluate(batch)));

  PoolScheduler single(objective, 1);
  CHECK(by_input(single.evaluate(batch)) == by_input(serial.evaluate(batch)));
}

TEST_CASE("pool scheduler pairs each result with its own configuration") {
  // Larger inputs sleep longer, so completion order is the reverse of
  // submission order; the pairing must survive that.
  PoolScheduler pool(
      [](const Configuration& c) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(long(xvalue(c) * 40.0)));
        return xvalue(c) + 100.0;
      },
      4);
  const auto results = pool.evaluate(
      {xpoint(4.0), xpoint(3.0), xpoint(2.0), xpoint(1.0)});
  REQUIRE(results.size() == 4);
  for (const auto& result : results) {
    CHECK(result.value == xvalue(result.config) + 100.0);
  }
  // Fastest (smallest) inputs finish first.
  CHECK(xvalue(results.front().config) == 1.0);
}

TEST_CASE("pool scheduler drops evaluations that outlive the deadline") {
  PoolScheduler pool(
      [](const Configuration& c) {
        if (xvalue(c) > 2.5) {
          std::this_thread::sleep_for(5s);
        }
        return xvalue(c);
      },
      4, 300ms);
  const auto start = std::chrono::steady_clock::now();
  const auto results = pool.evaluate(
      {xpoint(1.0), xpoint(2.0), xpoint(3.0), xpoint(4.0)});
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(elapsed < 2s);
  const auto mapped = by_input(results);
  CHECK(mapped.size() == 2);
  CHECK(mapped.count(1.0) == 1);
  CHECK(mapped.count(2.0) == 1);
}

TEST_CASE("pool scheduler skips throwing evaluations") {
  PoolScheduler pool(
      [](const Configuration& c) -> double {
        if (xvalue(c) == 2.0) {
          throw std::runtime_error("boom");
        }
        return xvalue(c);
      },
      2);
  const auto mapped =
      pool.evaluate({xpoint(1.0), xpoint(2.0), xpoint(3.0)});
  CHECK(by_input(mapped).size() == 2);
}

TEST_CASE("worker processes answer a batch over the wire") {
  WorkerProcessScheduler scheduler(kToyWorker, 2, 10s);
  const auto results =
      scheduler.evaluate({xpoint(1.0), xpoint(2.0), xpoint(3.0)});
  const auto mapped = by_input(results);
  REQUIRE(mapped.size() == 3);
  CHECK(mapped.at(1.0) == doctest::Approx(1.0));
  CHECK(mapped.at(2.0) == doctest::Approx(4.0));
  CHECK(mapped.at(3.0) == doctest::Approx(9.0));
  CHECK(scheduler.dropped_requests() == 0);
}

TEST_CASE("a second evaluate call works and reuses nothing stale") {
  WorkerProcessScheduler scheduler(kToyWorker, 1, 10s);
  const auto first = by_input(scheduler.evaluate({xpoint(2.0)}));
  const auto second =
      by_input(scheduler.evaluate({xpoint(3.0), xpoint(4.0)}));
  CHECK(first.at(2.0) == doctest::Approx(4.0));
  CHECK(second.at(3.0) == doctest::Approx(9.0));
  CHECK(second.at(4.0) == doctest::Approx(16.0));
}

TEST_CASE("out-of-order replies are matched by id") {
  WorkerProcessScheduler scheduler(kToyWorker + " --reverse", 1, 10s);
  const auto mapped = by_input(
      scheduler.evaluate({xpoint(1.0), xpoint(2.0), xpoint(5.0)}));
  REQUIRE(mapped.size() == 3);
  CHECK(mapped.at(5.0) == doctest::Approx(25.0));
  CHECK(mapped.at(1.0) == doctest::Approx(1.0));
}

TEST_CASE("worker-reported errors drop only the failing evaluation") {
  WorkerProcessScheduler scheduler(kToyWorker + " --fail-every 2", 1, 10s);
  const auto mapped = by_input(scheduler.evaluate(
      {xpoint(1.0), xpoint(2.0), xpoint(3.0), xpoint(4.0)}));
  CHECK(mapped.size() == 2);  // requests 2 and 4 report failure
  CHECK(mapped.count(1.0) == 1);
  CHECK(mapped.count(3.0) == 1);
  CHECK(scheduler.dropped_requests() == 2);
}

TEST_CASE("a malformed message discards that worker but not the others") {
  // Two workers, round-robin dispatch: the poisoned worker loses whatever it
  // had not answered, the healthy worker's results all arrive.
  WorkerProcessScheduler scheduler(kToyWorker + " --malformed-after 1", 2,
                                   10s);
  std::vector<Configuration> batch;
  for (int i = 1; i <= 6; ++i) {
    batch.push_back(xpoint(double(i)));
  }
  const auto mapped = by_input(scheduler.evaluate(batch));
  // Each worker answers its first request, then the second reply from each
  // is garbage; at least the two leading replies must have survived.
  CHECK(mapped.size() >= 2);
  CHECK(mapped.size() < 6);
  for (const auto& [input, value] : mapped) {
    CHECK(value == doctest::Approx(input * input));
  }
  CHECK(scheduler.dropped_requests() >= 1);
}

TEST_CASE("typed parameter values survive the wire protocol") {
  SearchSpace space;
  space.add("x", Continuous{DistKind::kUniform, 0.0, 2.0});
  space.add("n", IntRange{0, 10});
  space.add("c", Categorical{{"a", "b"}});

  Configuration config;
  config.values["x"] = 1.5;
  config.values["n"] = std::int64_t{4};
  config.values["c"] = std::string("b");
  space.validate(config);

  // The mixed objective exits with status 3 on any mistyped field, which
  // would surface here as a missing result.
  WorkerProcessScheduler scheduler(kToyWorker + " --objective mixed", 1, 10s);
  const auto results = scheduler.evaluate({config});
  REQUIRE(results.size() == 1);
  CHECK(results[0].value == doctest::Approx(1.5 * 1.5 + 4.0 + 0.5));
}

TEST_CASE("slow workers are cut off at the batch timeout") {
  WorkerProcessScheduler scheduler(kToyWorker + " --sleep-ms 400", 1, 150ms);
  const auto start = std::chrono::steady_clock::now();
  const auto results = scheduler.evaluate(
      {xpoint(1.0), xpoint(2.0), xpoint(3.0), xpoint(4.0)});
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(results.size() <= 1);
  CHECK(elapsed < 5s);
  CHECK(scheduler.dropped_requests() >= 3);
}

TEST_CASE("construction rejects a command that cannot run") {
  CHECK_THROWS_AS(
      WorkerProcessScheduler("/no/such/binary/anywhere", 1, 1s),
      SchedulerError);
}

TEST_CASE("construction rejects a worker that ignores end-of-input") {
  // `sleep` never reads stdin, so the probe's close-stdin handshake times
  // out. The probe wait is capped by the batch timeout.
  const auto start = std::chrono::steady_clock::now();
  CHECK_THROWS_AS(WorkerProcessScheduler("sleep 30", 1, 500ms),
                  SchedulerError);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(elapsed < 10s);
}

TEST_CASE("command strings honour quoted arguments") {
  CHECK_THROWS_AS(WorkerProcessScheduler("", 1, 1s), SchedulerError);
  CHECK_THROWS_AS(WorkerProcessScheduler("worker \"unterminated", 1, 1s),
                  SchedulerError);
  // A quoted flag value containing a space must reach the worker as one
  // argv entry: the toy worker would otherwise reject the flag and exit 2,
  // failing the construction probe.
  WorkerProcessScheduler scheduler(kToyWorker + " --objective \"square\"", 1,
                                   10s);
  const auto results = scheduler.evaluate({xpoint(3.0)});
  REQUIRE(results.size() == 1);
  CHECK(results[0].value == doctest::Approx(9.0));
}
