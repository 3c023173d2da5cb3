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

#include <chrono>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "paratune/search_space.hpp"

namespace paratune {

class SchedulerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One completed evaluation.
struct EvalResult {
  Configuration config;
  double value = 0.0;
};

using Objective = std::function<double(const Configuration&)>;

inline constexpr std::chrono::milliseconds kDefaultBatchTimeout{600'000};

/// Evaluates batches of configurations. Implementations may return any
/// subset of the batch in any order — callers must match results to
/// configurations, never rely on positions — and must return within the
/// configured per-batch timeout (overshooting by at most one evaluation).
/// One scheduler instance serves one caller at a time.
class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual std::vector<EvalResult> evaluate(
      const std::vector<Configuration>& batch) = 0;
};

/// In-order, in-process evaluation. A throwing evaluation is skipped; once
/// the deadline passes no further evaluation starts.
class SerialScheduler : public Scheduler {
 public:
  explicit SerialScheduler(
      Objective objective,
      std::chrono::milliseconds timeout = kDefaultBatchTimeout);

  std::vector<EvalResult> evaluate(
      const std::vector<Configuration>& batch) override;

 private:
  Objective objective_;
  std::chrono::milliseconds timeout_;
};

/// Up to `workers` in-process evaluations in flight at once. Results are
/// collected in completion order; throwing evaluations are skipped and
/// evaluations unfinished at the deadline are dropped (their threads are
/// abandoned, never joined into the result).
class PoolScheduler : public Scheduler {
 public:
  PoolScheduler(Objective objective, std::size_t workers,
                std::chrono::milliseconds timeout = kDefaultBatchTimeout);

  std::vector<EvalResult> evaluate(
      const std::vector<Configuration>& batch) override;

 private:
  Objective objective_;
  std::size_t workers_;
  std::chrono::milliseconds timeout_;
};

/// Evaluation through external worker processes speaking a line-delimited
/// JSON protocol on stdin/stdout. Each evaluate() call spawns up to
/// `workers` processes from `command`, distributes the batch round-robin as
/// `{"id": <int>, "params": {...}}` request lines, and matches
/// `{"id": <int>, "objective": <num>}` / `{"id": <int>, "error": <string>}`
/// replies by id; ids are unique across the scheduler's lifetime. Workers
/// receive end-of-input after their requests and must exit; all are
/// terminated before evaluate() returns. A worker that emits a malformed or
/// unexpected message is discarded along with its unanswered requests.
///
/// Construction probes the command once (spawn, close stdin, await exit)
/// and throws SchedulerError when the worker cannot start or ignores
/// end-of-input.
class WorkerProcessScheduler : public Scheduler {
 public:
  explicit WorkerProcessScheduler(
      std::string command, std::size_t workers = 1,
      std::chrono::milliseconds timeout = kDefaultBatchTimeout);

  std::vector<EvalResult> evaluate(
      const std::vector<Configuration>& batch) override;

  /// Protocol-level failures seen so far: worker-reported errors, malformed
  /// messages, and requests dropped by worker death or timeout.
  std::uint64_t dropped_requests() const { return dropped_requests_; }

 private:
  std::vector<std::string> argv_;
  std::size_t workers_;
  std::chrono::milliseconds timeout_;
  std::uint64_t next_id_ = 1;
  std::uint64_t dropped_requests_ = 0;
};

}  // namespace paratune
