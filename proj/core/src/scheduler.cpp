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

#include <poll.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>

#include <json.hpp>

#include "subprocess.hpp"

namespace paratune {
namespace {

using Clock = std::chrono::steady_clock;
using internal::ChildProcess;

constexpr std::chrono::milliseconds kTerminateGrace{2000};
constexpr std::chrono::milliseconds kProbeTimeout{10'000};

nlohmann::json param_value_to_json(const ParamValue& value) {
  if (const auto* d = std::get_if<double>(&value)) {
    return *d;
  }
  if (const auto* i = std::get_if<std::int64_t>(&value)) {
    return *i;
  }
  return std::get<std::string>(value);
}

std::string request_line(std::uint64_t id, const Configuration& config) {
  nlohmann::ordered_json msg;
  msg["id"] = id;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [name, value] : config.values) {
    params[name] = param_value_to_json(value);
  }
  msg["params"] = std::move(params);
  return msg.dump() + "\n";
}

// One worker process plus everything needed to route its replies.
struct WorkerSlot {
  ChildProcess proc;
  std::string read_buffer;
  std::vector<std::uint64_t> pending;  // unanswered request ids
  bool alive = false;
};

void discard_worker(WorkerSlot& slot, std::uint64_t& dropped) {
  if (!slot.alive) {
    return;
  }
  dropped += slot.pending.size();
  slot.pending.clear();
  slot.alive = false;
  internal::terminate_process(slot.proc, std::chrono::milliseconds(0));
}

}  // namespace

SerialScheduler::SerialScheduler(Objective objective,
                                 std::chrono::milliseconds timeout)
    : objective_(std::move(objective)), timeout_(timeout) {}

std::vector<EvalResult> SerialScheduler::evaluate(
    const std::vector<Configuration>& batch) {
  const auto deadline = Clock::now() + timeout_;
  std::vector<EvalResult> results;
  results.reserve(batch.size());
  for (const auto& config : batch) {
    if (Clock::now() >= deadline) {
      break;
    }
    try {
      results.push_back({config, objective_(config)});
    } catch (...) {
      // A failed evaluation costs its slot, nothing more.
    }
  }
  return results;
}

PoolScheduler::PoolScheduler(Objective objective, std::size_t workers,
                             std::chrono::milliseconds timeout)
    : objective_(std::move(objective)), workers_(workers), timeout_(timeout) {
  if (workers == 0) {
    throw SchedulerError("pool needs at least one worker");
  }
}

std::vector<EvalResult> PoolScheduler::evaluate(
    const std::vector<Configuration>& batch) {
  struct Shared {
    std::mutex mu;
    std::condition_variable done;
    std::vector<Configuration> configs;
    std::vector<EvalResult> results;
    std::size_t next = 0;
    std::size_t completed = 0;
    bool closed = false;  // deadline passed; late finishers discard
  };
  auto shared = std::make_shared<Shared>();
  shared->configs = batch;
  const std::size_t n = batch.size();

  for (std::size_t w = 0; w < std::min(workers_, n); ++w) {
    std::thread([shared, objective = objective_] {
      for (;;) {
        std::size_t index;
        {
          std::lock_guard<std::mutex> lock(shared->mu);
          if (shared->closed || shared->next >= shared->configs.size()) {
            return;
          }
          index = shared->next++;
        }
        bool ok = true;
        double value = 0.0;
        try {
          value = objective(shared->configs[index]);
        } catch (...) {
          ok = false;
        }
        {
          std::lock_guard<std::mutex> lock(shared->mu);
          if (shared->closed) {
            return;
          }
          if (ok) {
            shared->results.push_back({shared->configs[index], value});
          }
          ++shared->completed;
        }
        shared->done.notify_one();
      }
    }).detach();
  }

  std::unique_lock<std::mutex> lock(shared->mu);
  shared->done.wait_until(lock, Clock::now() + timeout_,
                          [&] { return shared->completed == n; });
  shared->closed = true;
  return std::move(shared->results);
}

WorkerProcessScheduler::WorkerProcessScheduler(
    std::string command, std::size_t workers, std::chrono::milliseconds timeout)
    : argv_(internal::split_command(command)),
      workers_(workers),
      timeout_(timeout) {
  if (workers == 0) {
    throw SchedulerError("worker scheduler needs at least one worker");
  }
  // Probe: the command must start, and must exit once its input ends.
  ChildProcess probe = internal::spawn_process(argv_);
  internal::close_fd(probe.stdin_fd);
  if (!internal::wait_exit(probe, std::min(kProbeTimeout, timeout_))) {
    internal::terminate_process(probe, std::chrono::milliseconds(0));
    throw SchedulerError("worker '" + argv_[0] +
                         "' did not exit on end-of-input");
  }
  internal::close_fd(probe.stdout_fd);
}

std::vector<EvalResult> WorkerProcessScheduler::evaluate(
    const std::vector<Configuration>& batch) {
  const auto deadline = Clock::now() + timeout_;
  std::vector<EvalResult> results;
  if (batch.empty()) {
    return results;
  }

  std::map<std::uint64_t, std::size_t> id_to_index;
  std::vector<WorkerSlot> slots(std::min(workers_, batch.size()));

  // Spawn, assign round-robin, send every request, close the input side.
  for (auto& slot : slots) {
    try {
      slot.proc = internal::spawn_process(argv_);
      slot.alive = true;
    } catch (const SchedulerError&) {
      slot.alive = false;  // others may still carry the batch
    }
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto& slot = slots[i % slots.size()];
    const std::uint64_t id = next_id_++;
    id_to_index.emplace(id, i);
    if (slot.alive) {
      slot.pending.push_back(id);
    } else {
      ++dropped_requests_;
    }
  }
  for (auto& slot : slots) {
    if (!slot.alive) {
      continue;
    }
    std::string outgoing;
    for (const std::uint64_t id : slot.pending) {
      outgoing += request_line(id, batch[id_to_index.at(id)]);
    }
    std::size_t written = 0;
    bool failed = false;
    while (written < outgoing.size()) {
      const ssize_t n = write(slot.proc.stdin_fd, outgoing.data() + written,
                              outgoing.size() - written);
      if (n <= 0) {
        failed = true;
        break;
      }
      written += static_cast<std::size_t>(n);
    }
    internal::close_fd(slot.proc.stdin_fd);
    if (failed) {
      discard_worker(slot, dropped_requests_);
    }
  }

  // Collect replies until everything is answered, everyone is gone, or the
  // deadline passes.
  auto outstanding = [&] {
    std::size_t n = 0;
    for (const auto& slot : slots) {
      n += slot.pending.size();
    }
    return n;
  };

  auto handle_line = [&](WorkerSlot& slot, const std::string& line) -> bool {
    nlohmann::json msg;
    try {
      msg = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      return false;
    }
    if (!msg.is_object() || !msg.contains("id") ||
        !msg["id"].is_number_integer()) {
      return false;
    }
    const auto id = msg["id"].get<std::uint64_t>();
    const auto pending_it =
        std::find(slot.pending.begin(), slot.pending.end(), id);
    if (pending_it == slot.pending.end()) {
      return false;  // unknown id, someone else's id, or a duplicate reply
    }
    if (msg.contains("objective")) {
      if (!msg["objective"].is_number()) {
        return false;
      }
      const double value = msg["objective"].get<double>();
      if (!std::isfinite(value)) {
        return false;
      }
      results.push_back({batch[id_to_index.at(id)], value});
    } else if (msg.contains("error")) {
      ++dropped_requests_;  // worker answered, evaluation itself failed
    } else {
      return false;
    }
    slot.pending.erase(pending_it);
    return true;
  };

  while (outstanding() > 0) {
    std::vector<pollfd> fds;
    std::vector<std::size_t> fd_slot;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      if (slots[s].alive) {
        fds.push_back({slots[s].proc.stdout_fd, POLLIN, 0});
        fd_slot.push_back(s);
      }
    }
    if (fds.empty()) {
      break;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (remaining.count() <= 0) {
      break;
    }
    const int ready = poll(fds.data(), fds.size(),
                           static_cast<int>(std::min<std::int64_t>(
                               remaining.count(), 60'000)));
    if (ready < 0) {
      if (errno == EINTR) {
        continue;
      }
      break;
    }
    if (ready == 0) {
      continue;  // re-check the deadline
    }
    for (std::size_t f = 0; f < fds.size(); ++f) {
      if ((fds[f].revents & (POLLIN | POLLHUP | POLLERR)) == 0) {
        continue;
      }
      WorkerSlot& slot = slots[fd_slot[f]];
      char chunk[4096];
      const ssize_t n = read(slot.proc.stdout_fd, chunk, sizeof(chunk));
      if (n < 0 && errno == EINTR) {
        continue;
      }
      if (n <= 0) {
        // End of stream: whatever is unanswered stays unanswered.
        discard_worker(slot, dropped_requests_);
        continue;
      }
      slot.read_buffer.append(chunk, static_cast<std::size_t>(n));
      std::size_t start = 0;
      bool violated = false;
      for (std::size_t nl = slot.read_buffer.find('\n', start);
           nl != std::string::npos && !violated;
           start = nl + 1, nl = slot.read_buffer.find('\n', start)) {
        const std::string line = slot.read_buffer.substr(start, nl - start);
        if (!line.empty() && !handle_line(slot, line)) {
          violated = true;
        }
      }
      slot.read_buffer.erase(0, start);
      if (violated) {
        discard_worker(slot, dropped_requests_);
      }
    }
  }

  for (auto& slot : slots) {
    if (slot.alive) {
      dropped_requests_ += slot.pending.size();
      slot.pending.clear();
      slot.alive = false;
      internal::terminate_process(slot.proc, kTerminateGrace);
    }
  }
  return results;
}

}  // namespace paratune
