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

#include "paratune/benchmarks.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>

namespace paratune {
namespace {

// Minimum of the integer-x2 variant over [-5, 10] x {0..15}, found by a
// dense per-slice search (the slice through x2 = 12 wins, near x1 = -3.079).
constexpr double kBraninMixedOptimum = 0.43233595324928586;

std::string format_csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

double branin(double x1, double x2) {
  if (!(x1 >= -5.0 && x1 <= 10.0) || !(x2 >= 0.0 && x2 <= 15.0)) {
    throw ValidationError("branin input (" + format_csv_double(x1) + ", " +
                          format_csv_double(x2) +
                          ") outside [-5, 10] x [0, 15]");
  }
  constexpr double pi = std::numbers::pi;
  constexpr double a = 1.0;
  constexpr double b = 5.1 / (4.0 * pi * pi);
  constexpr double c = 5.0 / pi;
  constexpr double r = 6.0;
  constexpr double s = 10.0;
  constexpr double t = 1.0 / (8.0 * pi);
  const double inner = x2 - b * x1 * x1 + c * x1 - r;
  return a * inner * inner + s * (1.0 - t) * std::cos(x1) + s;
}

double branin_mixed(double x1, std::int64_t x2) {
  if (x2 < 0 || x2 > 15) {
    throw ValidationError("branin_mixed requires x2 in {0, ..., 15}, got " +
                          std::to_string(x2));
  }
  return branin(x1, static_cast<double>(x2));
}

BenchmarkName parse_benchmark_name(std::string_view name) {
  if (name == "branin") {
    return BenchmarkName::kBranin;
  }
  if (name == "branin_mixed") {
    return BenchmarkName::kBraninMixed;
  }
  if (name == "quadratic") {
    return BenchmarkName::kQuadratic;
  }
  throw ValidationError("unknown benchmark '" + std::string(name) +
                        "' (expected branin, branin_mixed, or quadratic)");
}

std::string to_string(BenchmarkName name) {
  switch (name) {
    case BenchmarkName::kBranin:
      return "branin";
    case BenchmarkName::kBraninMixed:
      return "branin_mixed";
    case BenchmarkName::kQuadratic:
      return "quadratic";
  }
  return "unknown";
}

BenchmarkSpec make_benchmark(BenchmarkName name) {
  BenchmarkSpec spec;
  spec.name = name;
  switch (name) {
    case BenchmarkName::kBranin:
      spec.space.add("x1", Continuous{DistKind::kUniform, -5.0, 15.0});
      spec.space.add("x2", Continuous{DistKind::kUniform, 0.0, 15.0});
      spec.known_optimum = 5.0 / (4.0 * std::numbers::pi);
      break;
    case BenchmarkName::kBraninMixed:
      spec.space.add("x1", Continuous{DistKind::kUniform, -5.0, 15.0});
      spec.space.add("x2", IntRange{0, 16});
      spec.known_optimum = kBraninMixedOptimum;
      break;
    case BenchmarkName::kQuadratic:
      spec.space.add("x", Continuous{DistKind::kUniform, 0.0, 1.0});
      spec.known_optimum = 0.0;
      break;
  }
  return spec;
}

Objective benchmark_objective(const BenchmarkSpec& spec) {
  switch (spec.name) {
    case BenchmarkName::kBranin:
      return [](const Configuration& config) {
        return branin(std::get<double>(config.values.at("x1")),
                      std::get<double>(config.values.at("x2")));
      };
    case BenchmarkName::kBraninMixed:
      return [](const Configuration& config) {
        return branin_mixed(std::get<double>(config.values.at("x1")),
                            std::get<std::int64_t>(config.values.at("x2")));
      };
    case BenchmarkName::kQuadratic:
      return [](const Configuration& config) {
        const double x = std::get<double>(config.values.at("x"));
        return (x - 0.3) * (x - 0.3);
      };
  }
  throw ValidationError("unhandled benchmark");
}

ConvergenceTable run_convergence_experiment(
    const BenchmarkSpec& bench, const std::vector<Algorithm>& algorithms,
    std::size_t batch_size, std::size_t iterations, std::size_t repeats,
    std::uint64_t base_seed, std::optional<std::size_t> initial_random) {
  ConvergenceTable table;
  for (const Algorithm algorithm : algorithms) {
    const std::string algorithm_name = to_string(algorithm);
    for (std::size_t r = 0; r < repeats; ++r) {
      TunerConfig config;
      config.algorithm = algorithm;
      config.batch_size = batch_size;
      config.max_iterations = iterations;
      config.initial_random = initial_random;
      config.seed = base_seed + r;
      config.direction = Direction::kMinimize;

      SerialScheduler scheduler(benchmark_objective(bench));
      TrialHistory history;
      bool complete = true;
      try {
        history = tune(bench.space, config, scheduler).history;
      } catch (const TunerAbort& abort) {
        history = abort.partial().history;
        complete = false;
        table.incomplete_runs.emplace_back(algorithm_name, config.seed);
      }
      if (history.empty()) {
        continue;
      }

      std::vector<std::size_t> counts;
      for (const auto& record : history.records()) {
        if (record.iteration >= counts.size()) {
          counts.resize(record.iteration + 1, 0);
        }
        ++counts[record.iteration];
      }
      const std::vector<double> best = best_by_iteration(history);
      std::size_t cumulative = 0;
      for (std::size_t it = 0; it < best.size(); ++it) {
        cumulative += it < counts.size() ? counts[it] : 0;
        table.rows.push_back({algorithm_name, config.seed, it, cumulative,
                              best[it]});
      }
      (void)complete;
    }
  }
  return table;
}

std::vector<double> mean_best_series(const ConvergenceTable& table,
                                     std::string_view algorithm) {
  std::map<std::size_t, std::pair<double, std::size_t>> sums;
  for (const auto& row : table.rows) {
    if (row.algorithm != algorithm) {
      continue;
    }
    auto& [sum, count] = sums[row.iteration];
    sum += row.best_so_far;
    ++count;
  }
  std::vector<double> means;
  means.reserve(sums.size());
  for (const auto& [iteration, bucket] : sums) {
    (void)iteration;
    means.push_back(bucket.first / double(bucket.second));
  }
  return means;
}

void write_convergence_csv(const ConvergenceTable& table, std::ostream& out) {
  out << "algorithm,seed,iteration,evaluations,best_so_far\n";
  for (const auto& row : table.rows) {
    out << row.algorithm << ',' << row.seed << ',' << row.iteration << ','
        << row.evaluations << ',' << format_csv_double(row.best_so_far)
        << '\n';
  }
}

}  // namespace paratune
