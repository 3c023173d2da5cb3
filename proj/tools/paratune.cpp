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

// Command-line front end: `tune` drives an external worker command over the
// line-delimited JSON protocol; `bench` runs the convergence harness on the
// built-in objectives.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "paratune/benchmarks.hpp"
#include "paratune/scheduler.hpp"
#include "paratune/search_space.hpp"
#include "paratune/tuner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAborted = 2;

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw paratune::ValidationError("cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

nlohmann::ordered_json config_to_json(const paratune::Configuration& config) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& [name, value] : config.values) {
    if (const auto* d = std::get_if<double>(&value)) {
      out[name] = *d;
    } else if (const auto* i = std::get_if<std::int64_t>(&value)) {
      out[name] = *i;
    } else {
      out[name] = std::get<std::string>(value);
    }
  }
  return out;
}

void write_result_document(const std::string& path,
                           const paratune::TuneResult& result) {
  nlohmann::ordered_json doc;
  doc["best_params"] = result.best_config.has_value()
                           ? config_to_json(*result.best_config)
                           : nlohmann::ordered_json(nullptr);
  doc["best_objective"] = result.best_value.has_value()
                              ? nlohmann::ordered_json(*result.best_value)
                              : nlohmann::ordered_json(nullptr);
  doc["evaluations"] = result.evaluations_completed;
  doc["best_series"] = result.history.empty()
                           ? std::vector<double>{}
                           : paratune::best_by_iteration(result.history);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw paratune::ValidationError("cannot write '" + path + "'");
  }
  out << doc.dump(2) << '\n';
}

struct TuneFlags {
  std::string space_path;
  std::string worker_cmd;
  std::string algorithm = "hallucination";
  std::size_t batch_size = 1;
  std::size_t iterations = 20;
  std::optional<std::size_t> initial_random;
  std::optional<std::size_t> mc_budget;
  std::uint64_t seed = 0;
  std::string direction = "minimize";
  std::size_t workers = 1;
  double timeout_s = 600.0;
  std::string output_path;
};

int run_tune(const TuneFlags& flags) {
  const paratune::SearchSpace space =
      paratune::parse_space(read_file(flags.space_path));

  paratune::TunerConfig config;
  config.algorithm = paratune::parse_algorithm(flags.algorithm);
  config.batch_size = flags.batch_size;
  config.max_iterations = flags.iterations;
  config.initial_random = flags.initial_random;
  config.mc_budget = flags.mc_budget;
  config.seed = flags.seed;
  config.direction = paratune::parse_direction(flags.direction);

  paratune::WorkerProcessScheduler scheduler(
      flags.worker_cmd, flags.workers,
      std::chrono::milliseconds(
          static_cast<std::int64_t>(flags.timeout_s * 1000.0)));

  paratune::TuneResult result;
  try {
    result = paratune::tune(space, config, scheduler);
  } catch (const paratune::TunerAbort& abort) {
    if (!flags.output_path.empty()) {
      write_result_document(flags.output_path, abort.partial());
    }
    std::cerr << "aborted: " << abort.what() << "\n";
    return kExitAborted;
  }

  if (!flags.output_path.empty()) {
    write_result_document(flags.output_path, result);
  }
  std::cout << "best " << format_value(result.best_value.value()) << " after "
            << result.evaluations_completed << " evaluations ("
            << flags.algorithm << ", seed " << flags.seed << ")\n";
  return kExitOk;
}

struct BenchFlags {
  std::string name = "branin";
  std::string algorithms = "hallucination";
  std::size_t batch_size = 1;
  std::size_t iterations = 20;
  std::size_t repeats = 10;
  std::optional<std::size_t> initial_random;
  std::uint64_t seed = 0;
  std::string output_path;
};

int run_bench(const BenchFlags& flags) {
  const paratune::BenchmarkSpec bench =
      paratune::make_benchmark(paratune::parse_benchmark_name(flags.name));

  std::vector<paratune::Algorithm> algorithms;
  std::stringstream list(flags.algorithms);
  for (std::string item; std::getline(list, item, ',');) {
    if (!item.empty()) {
      algorithms.push_back(paratune::parse_algorithm(item));
    }
  }
  if (algorithms.empty()) {
    throw paratune::ValidationError("no algorithms given");
  }

  const paratune::ConvergenceTable table =
      paratune::run_convergence_experiment(bench, algorithms, flags.batch_size,
                                           flags.iterations, flags.repeats,
                                           flags.seed, flags.initial_random);

  std::ofstream out(flags.output_path, std::ios::binary);
  if (!out) {
    throw paratune::ValidationError("cannot write '" + flags.output_path +
                                    "'");
  }
  paratune::write_convergence_csv(table, out);

  for (const paratune::Algorithm algorithm : algorithms) {
    const std::vector<double> means =
        paratune::mean_best_series(table, paratune::to_string(algorithm));
    std::cout << flags.name << ' ' << paratune::to_string(algorithm)
              << ": mean final best "
              << (means.empty() ? "n/a" : format_value(means.back())) << "\n";
  }
  if (!table.incomplete_runs.empty()) {
    std::cerr << table.incomplete_runs.size() << " run(s) aborted early\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel black-box hyperparameter tuning"};
  app.require_subcommand(1);

  TuneFlags tune_flags;
  CLI::App* tune = app.add_subcommand(
      "tune", "Optimize an external objective spoken over the worker "
              "protocol");
  tune->add_option("--space", tune_flags.space_path,
                   "Search-space file (JSON)")
      ->required();
  tune->add_option("--worker-cmd", tune_flags.worker_cmd,
                   "Command line that starts one worker process")
      ->required();
  tune->add_option("--algo", tune_flags.algorithm,
                   "hallucination, clustering, or random")
      ->capture_default_str();
  tune->add_option("--batch", tune_flags.batch_size, "Configurations per batch")
      ->capture_default_str();
  tune->add_option("--iters", tune_flags.iterations,
                   "Batches after the initial design")
      ->capture_default_str();
  tune->add_option("--init", tune_flags.initial_random,
                   "Initial random evaluations (default max(2, batch))");
  tune->add_option("--mc-budget", tune_flags.mc_budget,
                   "Acquisition samples per proposal (default from space)");
  tune->add_option("--seed", tune_flags.seed, "Random seed")
      ->capture_default_str();
  tune->add_option("--direction", tune_flags.direction,
                   "minimize or maximize")
      ->capture_default_str();
  tune->add_option("--workers", tune_flags.workers,
                   "Concurrent worker processes")
      ->capture_default_str();
  tune->add_option("--timeout-s", tune_flags.timeout_s,
                   "Per-batch timeout in seconds")
      ->capture_default_str();
  tune->add_option("--out", tune_flags.output_path,
                   "Result document path (JSON)");

  BenchFlags bench_flags;
  CLI::App* bench =
      app.add_subcommand("bench", "Run the convergence harness on a built-in "
                                  "objective");
  bench->add_option("--name", bench_flags.name,
                    "branin, branin_mixed, or quadratic")
      ->capture_default_str();
  bench->add_option("--algo", bench_flags.algorithms,
                    "Comma-separated algorithm list")
      ->capture_default_str();
  bench->add_option("--batch", bench_flags.batch_size,
                    "Configurations per batch")
      ->capture_default_str();
  bench->add_option("--iters", bench_flags.iterations,
                    "Batches after the initial design")
      ->capture_default_str();
  bench->add_option("--repeats", bench_flags.repeats, "Seeds per algorithm")
      ->capture_default_str();
  bench->add_option("--init", bench_flags.initial_random,
                    "Initial random evaluations (default max(2, batch))");
  bench->add_option("--seed", bench_flags.seed, "Base random seed")
      ->capture_default_str();
  bench->add_option("--out", bench_flags.output_path, "CSV output path")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (tune->parsed()) {
      return run_tune(tune_flags);
    }
    return run_bench(bench_flags);
  } catch (const paratune::TunerAbort& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return kExitAborted;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
