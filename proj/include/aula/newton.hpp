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

#include "aula/lagrangian.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace aula {

/**
 * Newton with adaptive step size alpha and Levenberg-Marquardt damping beta.
 *
 * Each trial solves (H + beta I) d = -grad, evaluates x + alpha d once and
 * accepts when value' <= value + rho alpha grad'd. Accepting multiplies beta
 * by beta_minus and grows alpha by alpha_plus (capped at 1); rejecting
 * multiplies beta by beta_plus and alpha by alpha_minus. Converged when
 * beta <= 1 and ||d||_inf < delta after an accepted step.
 */
struct NewtonParams {
  double alpha0 = 1.0;
  double beta0 = 1.0;
  double alpha_plus = 2.0;
  double alpha_minus = 0.1;
  double beta_plus = 1.0;
  double beta_minus = 1.0;
  double rho = 0.01;
  double delta = 1e-6;
  std::int64_t max_evals = 100000;
  /// A rejection with alpha ||d||_inf < failure_ratio * delta aborts.
  double failure_ratio = 1e-3;

  /// Throws std::invalid_argument when a parameter is out of range.
  void validate() const;
};

enum class StepOutcome { accepted, rejected, converged, gradient_failure, budget_exhausted };

std::string to_string(StepOutcome outcome);

struct NewtonState {
  VectorXd x;
  double alpha = 1.0;
  double beta = 1.0;
  LagrangianEval cached;
  std::int64_t eval_count = 0;
  double last_step_norm = 0.0;
  std::int64_t accepted_steps = 0;
};

/// Evaluates x0 (counted as one evaluation) and initializes alpha and beta.
NewtonState make_newton_state(const MeritFunction& merit, const VectorXd& x0,
                              const NewtonParams& params);

/// Starts from an existing evaluation at eval.x without evaluating again.
NewtonState make_newton_state(const MeritFunction& merit, ProblemEval eval,
                              const NewtonParams& params);

/// One trial point: at most one evaluation. params.delta is read on every call.
StepOutcome newton_step(NewtonState& state, const MeritFunction& merit,
                        const NewtonParams& params);

/// Swaps the cached merit evaluation, e.g. after a dual update. The new
/// evaluation must sit at state.x exactly; alpha, beta and counters are kept.
void replace_cached_eval(NewtonState& state, LagrangianEval new_eval);

struct NewtonStepRecord {
  std::int64_t iteration = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double step_norm = 0.0;
  double value = 0.0;
  StepOutcome outcome = StepOutcome::accepted;
};

struct NewtonResult {
  VectorXd x;
  NewtonState state;
  /// converged, gradient_failure or budget_exhausted
  StepOutcome outcome = StepOutcome::converged;
  std::vector<NewtonStepRecord> steps;
};

/// Iterates newton_step from a fresh state until it converges or fails.
NewtonResult newton_minimize(const MeritFunction& merit, const VectorXd& x0,
                             const NewtonParams& params);

/// Same, continuing from the given state.
NewtonResult newton_minimize(const MeritFunction& merit, NewtonState state,
                             const NewtonParams& params);

/// CSV with header iteration,alpha,beta,step_norm,value,outcome
/**
 * Undamped Newton refinement of a point that is already close to stationary.
 *
 * Takes full steps x - H^+ grad (pseudo-inverse through a complete orthogonal
 * decomposition) and keeps a step only when it lowers ||grad||_inf. Stops once
 * ||grad||_inf < tol or after max_steps steps. Intended for piecewise quadratic
 * merits, where one exact step lands on the minimizer once the active set has
 * settled.
 */
LagrangianEval polish_stationary(const MeritFunction& merit, const LagrangianEval& start,
                                 double tol, int max_steps = 20);

void write_newton_trace_csv(std::ostream& os, const std::vector<NewtonStepRecord>& steps);

}  // namespace aula
