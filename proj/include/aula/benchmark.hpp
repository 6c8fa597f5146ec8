/*
 Copyright 2026 Aula contributors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include "aula/problem_io.hpp"
#include "aula/random_lp.hpp"
#include "aula/solvers.hpp"
#include "aula/toy_trajectory.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aula {

struct RandomLpFamily {
  std::vector<int> n_list{5, 10, 15, 20};
  /// m = m_rule * n
  double m_rule = 3.0;
  int repetitions = 10;
  std::uint64_t base_seed = 1;
  OffsetMode offset_mode = OffsetMode::negate_abs;
  /// Redraw instances whose LP has no finite optimum.
  bool skip_unbounded = true;
  /// Solver keys applied on top of BenchmarkConfig::solver for this family.
  nlohmann::json solver_overrides = nlohmann::json::object();
};

struct ToyTrajectoryFamily {
  int T = 40;
  int d = 2;
  int min_obstacles = 1;
  int max_obstacles = 3;
  int repetitions = 8;
  std::uint64_t base_seed = 1;
  /// Unset means T - 1, which makes f the integral of the squared velocity
  /// of a path traversed in unit time.
  std::optional<double> smoothness_weight;
  /// Initial penalties default to 100 for this family.
  nlohmann::json solver_overrides = {{"mu0", 100.0}, {"nu0", 100.0}};
};

struct BenchmarkConfig {
  std::vector<Method> methods{Method::any_aula, Method::aula, Method::log_barrier,
                              Method::sqr_penalty};
  std::optional<RandomLpFamily> random_lp;
  std::optional<ToyTrajectoryFamily> toy_traj;
  SolverOptions solver;
  int jobs = 1;
};

struct BenchmarkRow {
  int instance = 0;
  Method method = Method::aula;
  std::string family;
  int n = 0;
  int m = 0;
  std::uint64_t seed = 0;
  std::int64_t f_evals = 0;
  int dual_updates = 0;
  double f_final = 0.0;
  /// f_final minus the best f_final over the eligible rows of this instance.
  /// Eligible: converged, or stopped at max_iter with violation below
  /// outer_tol. NaN for other rows.
  double suboptimality = 0.0;
  double violation = 0.0;
  SolveStatus status = SolveStatus::failed;
  FailureReason failure = FailureReason::none;
};

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  int count = 0;
};

/// Mean and standard error of the mean over the finite entries.
MeanStderr mean_stderr(const std::vector<double>& values);

struct AggregateRow {
  Method method = Method::aula;
  std::string family;
  int n = 0;
  int instances = 0;
  int converged = 0;
  MeanStderr f_evals;
  MeanStderr dual_updates;
  MeanStderr suboptimality;
  MeanStderr violation;
};

struct BenchmarkTable {
  /// Ordered by (instance, method position in the config).
  std::vector<BenchmarkRow> rows;
  /// Ordered by (family, n, method position).
  std::vector<AggregateRow> aggregates;
};

BenchmarkTable run_benchmark(const BenchmarkConfig& config);

/// method,family,n,m,seed,f_evals,dual_updates,f_final,suboptimality,violation,status
void write_benchmark_csv(std::ostream& os, const BenchmarkTable& table);

/// One line per (family, n, method): mean +/- stderr of f_evals, dual_updates, suboptimality and violation.
void write_benchmark_summary(std::ostream& os, const BenchmarkTable& table);

/// Applies snake_case keys mirroring SolverOptions (and a nested "newton" object).
void apply_solver_overrides(const nlohmann::json& node, SolverOptions& opts);

/// {"methods": [..], "families": {"random_lp": {..}, "toy_traj": {..}},
///  "solver": {..}, "jobs": N}. A family may carry its own "solver" object.
BenchmarkConfig parse_benchmark_config(const nlohmann::json& doc);
BenchmarkConfig load_benchmark_config(const std::string& path);

/// Registers toy_trajectory (and random_lp) as custom problem names.
void register_builtin_problems(ProblemRegistry& registry);

}  // namespace aula
