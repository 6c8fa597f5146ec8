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

#include "aula/newton.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace aula {

void NewtonParams::validate() const {
  if (!(alpha0 > 0.0 && alpha0 <= 1.0)) throw std::invalid_argument("alpha0 must be in (0, 1]");
  if (!(beta0 > 0.0)) throw std::invalid_argument("beta0 must be positive");
  if (!(alpha_minus > 0.0 && alpha_minus < 1.0 && alpha_plus > 1.0)) {
    throw std::invalid_argument("need 0 < alpha_minus < 1 < alpha_plus");
  }
  if (!(rho > 0.0 && rho < 0.5)) throw std::invalid_argument("rho must be in (0, 0.5)");
  if (!(beta_plus >= 1.0 && beta_minus <= 1.0 && beta_minus > 0.0)) {
    throw std::invalid_argument("need beta_plus >= 1 >= beta_minus > 0");
  }
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (max_evals <= 0) throw std::invalid_argument("max_evals must be positive");
  if (!(failure_ratio > 0.0)) throw std::invalid_argument("failure_ratio must be positive");
}

std::string to_string(StepOutcome outcome) {
  switch (outcome) {
    case StepOutcome::accepted:
      return "accepted";
    case StepOutcome::rejected:
      return "rejected";
    case StepOutcome::converged:
      return "converged";
    case StepOutcome::gradient_failure:
      return "gradient_failure";
    case StepOutcome::budget_exhausted:
      return "budget_exhausted";
  }
  return "unknown";
}

NewtonState make_newton_state(const MeritFunction& merit, const VectorXd& x0,
                              const NewtonParams& params) {
  NewtonState state = make_newton_state(merit, merit.problem().evaluate(x0, merit.needs_constraint_hessians()), params);
  state.eval_count = 1;
  return state;
}

NewtonState make_newton_state(const MeritFunction& merit, ProblemEval eval,
                              const NewtonParams& params) {
  params.validate();
  NewtonState state;
  state.x = eval.x;
  state.alpha = params.alpha0;
  state.beta = params.beta0;
  state.cached = merit.complete(std::move(eval));
  if (!std::isfinite(state.cached.value)) {
    throw EvaluationError("merit function is not finite at the start point");
  }
  return state;
}

StepOutcome newton_step(NewtonState& state, const MeritFunction& merit,
                        const NewtonParams& params) {
  if (state.eval_count >= params.max_evals) return StepOutcome::budget_exhausted;

  const LagrangianEval& cur = state.cached;
  const Eigen::Index n = state.x.size();
  MatrixXd damped = cur.hessian;
  damped.diagonal().array() += state.beta;
  Eigen::LLT<MatrixXd> llt(damped);
  if (llt.info() != Eigen::Success) {
    // Not positive definite at this damping: raise beta and count a rejection.
    state.beta *= 10.0;
    return StepOutcome::rejected;
  }
  const VectorXd step = llt.solve(-cur.gradient);
  if (!step.allFinite()) {
    state.beta *= 10.0;
    return StepOutcome::rejected;
  }
  const double step_norm = n > 0 ? step.cwiseAbs().maxCoeff() : 0.0;
  state.last_step_norm = step_norm;

  const VectorXd trial_x = state.x + state.alpha * step;
  ++state.eval_count;
  double trial_value = std::numeric_limits<double>::infinity();
  ProblemEval trial;
  try {
    trial = merit.problem().evaluate(trial_x, merit.needs_constraint_hessians());
    trial_value = merit.value(trial);
  } catch (const EvaluationError&) {
    trial_value = std::numeric_limits<double>::infinity();
  }

  const double slope = cur.gradient.dot(step);
  if (std::isfinite(trial_value) && trial_value <= cur.value + params.rho * state.alpha * slope) {
    state.cached = merit.complete(std::move(trial));
    state.x = trial_x;
    state.beta *= params.beta_minus;
    state.alpha = std::min(params.alpha_plus * state.alpha, 1.0);
    ++state.accepted_steps;
    if (state.beta <= 1.0 && step_norm < params.delta) return StepOutcome::converged;
    return StepOutcome::accepted;
  }

  // A rejected step that is already below tolerance ends the minimization here.
  if (state.beta <= 1.0 && step_norm < params.delta) return StepOutcome::converged;
  if (state.alpha * step_norm < params.failure_ratio * params.delta) {
    return StepOutcome::gradient_failure;
  }
  state.beta *= params.beta_plus;
  state.alpha *= params.alpha_minus;
  if (state.eval_count >= params.max_evals) return StepOutcome::budget_exhausted;
  return StepOutcome::rejected;
}

void replace_cached_eval(NewtonState& state, LagrangianEval new_eval) {
  if (new_eval.x().size() != state.x.size() || new_eval.x() != state.x) {
    throw std::invalid_argument("replace_cached_eval: evaluation is not at the state's point");
  }
  state.cached = std::move(new_eval);
}

NewtonResult newton_minimize(const MeritFunction& merit, const VectorXd& x0,
                             const NewtonParams& params) {
  return newton_minimize(merit, make_newton_state(merit, x0, params), params);
}

NewtonResult newton_minimize(const MeritFunction& merit, NewtonState state,
                             const NewtonParams& params) {
  params.validate();
  NewtonResult result;
  std::int64_t iteration = 0;
  for (;;) {
    const StepOutcome outcome = newton_step(state, merit, params);
    result.steps.push_back({iteration++, state.alpha, state.beta, state.last_step_norm,
                            state.cached.value, outcome});
    if (outcome == StepOutcome::converged || outcome == StepOutcome::gradient_failure ||
        outcome == StepOutcome::budget_exhausted) {
      result.outcome = outcome;
      break;
    }
  }
  result.x = state.x;
  result.state = std::move(state);
  return result;
}

LagrangianEval polish_stationary(const MeritFunction& merit, const LagrangianEval& start,
                                 double tol, int max_steps) {
  LagrangianEval cur = start;
  auto grad_norm = [](const LagrangianEval& e) {
    return e.gradient.size() > 0 ? e.gradient.cwiseAbs().maxCoeff() : 0.0;
  };
  double cur_norm = grad_norm(cur);
  for (int k = 0; k < max_steps && cur_norm >= tol; ++k) {
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(cur.hessian);
    const VectorXd x_new = cur.x() - cod.solve(cur.gradient);
    if (!x_new.allFinite()) break;
    LagrangianEval next = merit.evaluate(x_new);
    const double next_norm = grad_norm(next);
    if (!(next_norm < cur_norm)) break;
    cur = std::move(next);
    cur_norm = next_norm;
  }
  return cur;
}

void write_newton_trace_csv(std::ostream& os, const std::vector<NewtonStepRecord>& steps) {
  os << "iteration,alpha,beta,step_norm,value,outcome\n";
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::setprecision(17);
  for (const auto& s : steps) {
    os << s.iteration << ',' << s.alpha << ',' << s.beta << ',' << s.step_norm << ','
       << s.value << ',' << to_string(s.outcome) << '\n';
  }
  os.flags(flags);
  os.precision(precision);
}

}  // namespace aula
