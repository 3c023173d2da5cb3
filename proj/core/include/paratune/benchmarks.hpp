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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "paratune/scheduler.hpp"
#include "paratune/search_space.hpp"
#include "paratune/tuner.hpp"

namespace paratune {

/// The classic 2-D test function with three global minima of about
/// 0.397887 at (pi, 2.275), (-pi, 12.275), and (9.42478, 2.475).
/// Domain: x1 in [-5, 10], x2 in [0, 15]; out-of-domain input throws
/// ValidationError.
double branin(double x1, double x2);

/// branin with x2 restricted to the integers {0, ..., 15} — the minimal
/// mixed discrete/continuous instance. Out-of-domain input throws.
double branin_mixed(double x1, std::int64_t x2);

enum class BenchmarkName { kBranin, kBraninMixed, kQuadratic };

BenchmarkName parse_benchmark_name(std::string_view name);
std::string to_string(BenchmarkName name);

/// A named objective, its search space, and the optimum when one is known
/// (exact for branin and quadratic, brute-force for branin_mixed).
struct BenchmarkSpec {
  BenchmarkName name = BenchmarkName::kBranin;
  SearchSpace space;
  std::optional<double> known_optimum;
};

BenchmarkSpec make_benchmark(BenchmarkName name);

/// The benchmark's objective as a scheduler-ready callable (minimization
/// orientation).
Objective benchmark_objective(const BenchmarkSpec& spec);

/// One (run, iteration) point of a convergence experiment.
struct ConvergenceRow {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::size_t iteration = 0;
  std::size_t evaluations = 0;  // completed through this iteration
  double best_so_far = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// (algorithm, seed) runs that aborted; their rows stop early.
  std::vector<std::pair<std::string, std::uint64_t>> incomplete_runs;
};

/// Runs tune() once per (algorithm, seed) with seeds base_seed..base_seed +
/// repeats - 1 on the benchmark objective (serial evaluation, minimizing),
/// recording the best-so-far at every iteration. An aborted run contributes
/// the rows it completed and is listed in incomplete_runs. initial_random
/// falls back to the tuner default when not given.
ConvergenceTable run_convergence_experiment(
    const BenchmarkSpec& bench, const std::vector<Algorithm>& algorithms,
    std::size_t batch_size, std::size_t iterations, std::size_t repeats,
    std::uint64_t base_seed,
    std::optional<std::size_t> initial_random = std::nullopt);

/// Mean best-so-far across this algorithm's seeds, indexed by iteration.
/// Seeds missing an iteration (aborted runs) drop out of that iteration's
/// mean.
std::vector<double> mean_best_series(const ConvergenceTable& table,
                                     std::string_view algorithm);

/// CSV with header "algorithm,seed,iteration,evaluations,best_so_far" and
/// reals printed with 12 significant digits. Byte-stable for equal tables.
void write_convergence_csv(const ConvergenceTable& table, std::ostream& out);

}  // namespace paratune
