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

#include "aula/dual_update.hpp"
#include "aula/newton.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aula {

enum class Method { aula, any_aula, log_barrier, sqr_penalty };

std::string to_string(Method method);
/// Accepts the snake_case names produced by to_string.
Method parse_method(const std::string& name);

struct SolverOptions {
  Method method = Method::aula;
  double mu0 = 1.0;
  double nu0 = 1.0;
  /// Penalty growth per outer iteration. Unset means 1 for aula/any_aula
  /// and 2 for sqr_penalty.
  std::optional<double> mu_growth;
  double barrier_mu0 = 1.0;
  double barrier_shrink = 0.5;
  NewtonParams newton;
  /// Outer convergence: every KKT residual below this.
  double outer_tol = 1e-4;
  /// Any-time solver: Newton tolerance growth factor per step.
  double delta_double = 2.0;
  /// Maximum number of dual (or penalty/barrier) updates.
  int max_outer = 10000;
  /// Any-time solver: accepted Newton steps between dual updates. 0 waits
  /// until Newton reports convergence at the inflated tolerance.
  int anytime_steps_per_update = 1;
  /// Any-time solver: reset the Newton tolerance after each dual update.
  bool reset_delta = true;
  HessianMode hessian_mode = HessianMode::gauss_newton;
  RowSelection row_selection = RowSelection::mask;

  double effective_mu_growth() const;
  void validate() const;
};

enum class SolveStatus { converged, max_iter, failed };
enum class FailureReason { none, gradient_failure, infeasible_start, evaluation_error };

std::string to_string(SolveStatus status);
std::string to_string(FailureReason reason);

enum class TraceEvent { newton_step, newton_reject, dual_update, mu_update, fallback };

std::string to_string(TraceEvent event);

struct TraceRecord {
  int outer_iter = 0;
  /// Problem evaluations since the solve started.
  std::int64_t inner_evals = 0;
  double merit = 0.0;
  KktResiduals kkt;
  double lambda_inf = 0.0;
  TraceEvent event = TraceEvent::newton_step;
};

struct SolveTrace {
  std::vector<TraceRecord> records;

  int count(TraceEvent event) const;
  /// Header: outer_iter,inner_evals,merit,stationarity,primal_ineq,primal_eq,complementarity,lambda_inf,event
  void write_csv(std::ostream& os) const;
};

struct Solution {
  VectorXd x_final;
  DualState dual_final = DualState::zeros(0, 0);
  KktResiduals kkt;
  double f_final = 0.0;
  /// sum_i max(0, g_i) + sum_j |h_j| at x_final
  double violation = 0.0;
  std::int64_t f_evals = 0;
  /// Multiplier updates for aula/any_aula, penalty or barrier updates otherwise.
  int dual_updates = 0;
  int outer_iterations = 0;
  SolveTrace trace;
  SolveStatus status = SolveStatus::failed;
  FailureReason failure = FailureReason::none;
};

/// Nested loop: minimize L to newton.delta, centered update, repeat.
Solution solve_aula(const ConstrainedProblem& problem, const VectorXd& x0,
                    const SolverOptions& opts);

/// Warm start from given multipliers and penalty weights (opts.mu0/nu0 are ignored).
Solution solve_aula(const ConstrainedProblem& problem, const VectorXd& x0,
                    const DualState& dual0, const SolverOptions& opts);

/// Interleaves Newton steps (with growing tolerance) and any-time dual updates.
Solution solve_any_aula(const ConstrainedProblem& problem, const VectorXd& x0,
                        const SolverOptions& opts);

/// f - tau sum log(-g) + nu |h|^2, shrinking tau. Needs g(x0) < 0.
Solution solve_logbarrier(const ConstrainedProblem& problem, const VectorXd& x0,
                          const SolverOptions& opts);

/// f + mu sum max(0, g)^2 + nu |h|^2 with growing mu, nu.
Solution solve_sqrpenalty(const ConstrainedProblem& problem, const VectorXd& x0,
                          const SolverOptions& opts);

/// Dispatches on opts.method.
Solution solve(const ConstrainedProblem& problem, const VectorXd& x0, const SolverOptions& opts);

}  // namespace aula
