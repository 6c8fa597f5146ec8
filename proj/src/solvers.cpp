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

#include "aula/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace aula {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// f - tau sum log(-g_i) + nu |h|^2; +inf outside g < 0.
class LogBarrierMerit final : public MeritFunction {
 public:
  LogBarrierMerit(const ConstrainedProblem& problem, double tau, double nu, HessianMode mode)
      : problem_(&problem), tau_(tau), nu_(nu), mode_(mode) {}

  const ConstrainedProblem& problem() const override { return *problem_; }
  bool needs_constraint_hessians() const override {
    return mode_ == HessianMode::full && !problem_->constraints_affine();
  }

  double value(const ProblemEval& e) const override {
    if (e.g.size() > 0 && e.g.maxCoeff() >= 0.0) return kInf;
    double v = e.f + nu_ * e.h.squaredNorm();
    for (Eigen::Index i = 0; i < e.g.size(); ++i) v -= tau_ * std::log(-e.g[i]);
    return v;
  }

  LagrangianEval complete(ProblemEval e) const override {
    LagrangianEval out;
    out.value = value(e);
    out.gradient = e.grad_f;
    out.hessian = e.hess_f;
    const bool curvature = mode_ == HessianMode::full && !e.constraints_affine;
    if (curvature && !e.has_constraint_hessians() && e.g.size() + e.h.size() > 0) {
      throw ConfigurationError("full Hessian mode needs constraint Hessians");
    }
    for (Eigen::Index i = 0; i < e.g.size(); ++i) {
      const double slack = -e.g[i];
      const auto row = e.jac_g.row(i);
      out.gradient.noalias() += (tau_ / slack) * row.transpose();
      out.hessian.noalias() += (tau_ / (slack * slack)) * row.transpose() * row;
      if (curvature) out.hessian += (tau_ / slack) * e.hess_g[static_cast<size_t>(i)];
    }
    if (e.h.size() > 0) {
      out.gradient.noalias() += 2.0 * nu_ * e.jac_h.transpose() * e.h;
      out.hessian.noalias() += 2.0 * nu_ * e.jac_h.transpose() * e.jac_h;
      if (curvature) {
        for (Eigen::Index j = 0; j < e.h.size(); ++j) {
          out.hessian += 2.0 * nu_ * e.h[j] * e.hess_h[static_cast<size_t>(j)];
        }
      }
    }
    out.mask = activity_indicator(e.g, VectorXd::Zero(e.g.size()));
    out.source = std::move(e);
    return out;
  }

  void set_weights(double tau, double nu) {
    tau_ = tau;
    nu_ = nu;
  }

 private:
  const ConstrainedProblem* problem_;
  double tau_;
  double nu_;
  HessianMode mode_;
};

double inf_norm(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Shared bookkeeping for the four drivers.
class Recorder {
 public:
  explicit Recorder(const ConstrainedProblem& problem)
      : problem_(problem), start_evals_(problem.evaluation_count()) {}

  std::int64_t evals() const { return problem_.evaluation_count() - start_evals_; }

  void record(TraceEvent event, int outer, const LagrangianEval& le, const VectorXd& lambda,
              const VectorXd& kappa) {
    TraceRecord rec;
    rec.outer_iter = outer;
    rec.inner_evals = evals();
    rec.merit = le.value;
    rec.kkt = kkt_residuals(le.source, lambda, kappa);
    rec.lambda_inf = inf_norm(lambda);
    rec.event = event;
    trace_.records.push_back(rec);
  }

  Solution finish(const ProblemEval& at, const DualState& dual, SolveStatus status,
                  FailureReason failure, int dual_updates, int outer) {
    return finish(at, dual, dual.lambda(), dual.kappa(), status, failure, dual_updates, outer);
  }

  // Multiplier estimates may differ from the penalty state for the baselines.
  Solution finish(const ProblemEval& at, const DualState& dual, const VectorXd& lambda,
                  const VectorXd& kappa, SolveStatus status, FailureReason failure,
                  int dual_updates, int outer) {
    Solution s;
    s.x_final = at.x;
    s.dual_final = dual;
    s.kkt = kkt_residuals(at, lambda, kappa);
    s.f_final = at.f;
    s.violation = constraint_violation(at);
    s.f_evals = evals();
    s.dual_updates = dual_updates;
    s.outer_iterations = outer;
    s.trace = std::move(trace_);
    s.status = status;
    s.failure = failure;
    return s;
  }

 private:
  const ConstrainedProblem& problem_;
  std::int64_t start_evals_;
  SolveTrace trace_;
};

// Runs one inner minimization, logging every step.
NewtonResult run_inner(const MeritFunction& merit, NewtonState state, const NewtonParams& params,
                       Recorder& rec, int outer, const VectorXd& lambda, const VectorXd& kappa) {
  NewtonResult result;
  for (;;) {
    const StepOutcome outcome = newton_step(state, merit, params);
    rec.record(outcome == StepOutcome::rejected ? TraceEvent::newton_reject
                                                : TraceEvent::newton_step,
               outer, state.cached, lambda, kappa);
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

void check_start(const ConstrainedProblem& problem, const VectorXd& x0) {
  if (x0.size() != problem.dim_x()) throw DimensionError("x0 has the wrong dimension");
  if (!x0.allFinite()) throw std::invalid_argument("x0 must be finite");
}

Solution solve_unconstrained(const ConstrainedProblem& problem, const VectorXd& x0,
                             const SolverOptions& opts) {
  Recorder rec(problem);
  const DualState dual = DualState::zeros(0, 0, opts.mu0, opts.nu0);
  AugmentedLagrangian merit(problem, dual, opts.hessian_mode);
  NewtonResult inner = run_inner(merit, make_newton_state(merit, x0, opts.newton), opts.newton,
                                 rec, 0, dual.lambda(), dual.kappa());
  const SolveStatus status = inner.outcome == StepOutcome::converged ? SolveStatus::converged
                             : inner.outcome == StepOutcome::gradient_failure
                                 ? SolveStatus::failed
                                 : SolveStatus::max_iter;
  const FailureReason why = inner.outcome == StepOutcome::gradient_failure
                                ? FailureReason::gradient_failure
                                : FailureReason::none;
  return rec.finish(inner.state.cached.source, dual, status, why, 0, 1);
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::aula:
      return "aula";
    case Method::any_aula:
      return "any_aula";
    case Method::log_barrier:
      return "log_barrier";
    case Method::sqr_penalty:
      return "sqr_penalty";
  }
  return "aula";
}

Method parse_method(const std::string& name) {
  if (name == "aula") return Method::aula;
  if (name == "any_aula") return Method::any_aula;
  if (name == "log_barrier") return Method::log_barrier;
  if (name == "sqr_penalty") return Method::sqr_penalty;
  throw std::invalid_argument("unknown method '" + name + "'");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iter:
      return "max_iter";
    case SolveStatus::failed:
      return "failed";
  }
  return "failed";
}

std::string to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::none:
      return "none";
    case FailureReason::gradient_failure:
      return "gradient_failure";
    case FailureReason::infeasible_start:
      return "infeasible_start";
    case FailureReason::evaluation_error:
      return "evaluation_error";
  }
  return "none";
}

std::string to_string(TraceEvent event) {
  switch (event) {
    case TraceEvent::newton_step:
      return "newton_step";
    case TraceEvent::newton_reject:
      return "newton_reject";
    case TraceEvent::dual_update:
      return "dual_update";
    case TraceEvent::mu_update:
      return "mu_update";
    case TraceEvent::fallback:
      return "fallback";
  }
  return "newton_step";
}

double SolverOptions::effective_mu_growth() const {
  if (mu_growth) return *mu_growth;
  return method == Method::sqr_penalty ? 2.0 : 1.0;
}

void SolverOptions::validate() const {
  newton.validate();
  if (!(mu0 > 0.0 && nu0 > 0.0)) throw std::invalid_argument("mu0 and nu0 must be positive");
  if (!(effective_mu_growth() >= 1.0)) throw std::invalid_argument("mu_growth must be >= 1");
  if (!(barrier_mu0 > 0.0)) throw std::invalid_argument("barrier_mu0 must be positive");
  if (!(barrier_shrink > 0.0 && barrier_shrink < 1.0)) {
    throw std::invalid_argument("barrier_shrink must be in (0, 1)");
  }
  if (!(outer_tol > 0.0)) throw std::invalid_argument("outer_tol must be positive");
  if (!(delta_double >= 1.0)) throw std::invalid_argument("delta_double must be >= 1");
  if (max_outer <= 0) throw std::invalid_argument("max_outer must be positive");
  if (anytime_steps_per_update < 0) {
    throw std::invalid_argument("anytime_steps_per_update must be >= 0");
  }
}

int SolveTrace::count(TraceEvent event) const {
  return static_cast<int>(std::count_if(records.begin(), records.end(),
                                        [event](const TraceRecord& r) { return r.event == event; }));
}

void SolveTrace::write_csv(std::ostream& os) const {
  os << "outer_iter,inner_evals,merit,stationarity,primal_ineq,primal_eq,complementarity,"
        "lambda_inf,event\n";
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::setprecision(12);
  for (const auto& r : records) {
    os << r.outer_iter << ',' << r.inner_evals << ',' << r.merit << ',' << r.kkt.stationarity
       << ',' << r.kkt.primal_ineq << ',' << r.kkt.primal_eq << ',' << r.kkt.complementarity
       << ',' << r.lambda_inf << ',' << to_string(r.event) << '\n';
  }
  os.flags(flags);
  os.precision(precision);
}

Solution solve_aula(const ConstrainedProblem& problem, const VectorXd& x0,
                    const SolverOptions& opts) {
  return solve_aula(problem, x0,
                    DualState::zeros(problem.dim_g(), problem.dim_h(), opts.mu0, opts.nu0), opts);
}

Solution solve_aula(const ConstrainedProblem& problem, const VectorXd& x0,
                    const DualState& dual0, const SolverOptions& opts) {
  opts.validate();
  check_start(problem, x0);
  if (dual0.lambda().size() != problem.dim_g() || dual0.kappa().size() != problem.dim_h()) {
    throw std::invalid_argument("initial multipliers do not match the constraint counts");
  }
  if (problem.dim_g() + problem.dim_h() == 0) return solve_unconstrained(problem, x0, opts);

  Recorder rec(problem);
  const double growth = opts.effective_mu_growth();
  DualState dual = dual0;
  AugmentedLagrangian merit(problem, dual, opts.hessian_mode);
  NewtonState state = make_newton_state(merit, x0, opts.newton);
  int updates = 0;

  for (int outer = 0;; ++outer) {
    NewtonResult inner =
        run_inner(merit, std::move(state), opts.newton, rec, outer, dual.lambda(), dual.kappa());
    state = std::move(inner.state);
    if (inner.outcome == StepOutcome::gradient_failure) {
      return rec.finish(state.cached.source, dual, SolveStatus::failed,
                        FailureReason::gradient_failure, updates, outer + 1);
    }

    const ProblemEval& at = state.cached.source;
    DualUpdateResult upd = centered_update(at.g, at.h, dual);
    dual = dual.with_multipliers(std::move(upd.lambda_new), std::move(upd.kappa_new));
    ++updates;
    rec.record(TraceEvent::dual_update, outer, state.cached, dual.lambda(), dual.kappa());

    if (inner.outcome == StepOutcome::converged && kkt_residuals(at, dual).max() < opts.outer_tol) {
      return rec.finish(at, dual, SolveStatus::converged, FailureReason::none, updates, outer + 1);
    }
    if (updates >= opts.max_outer) {
      return rec.finish(at, dual, SolveStatus::max_iter, FailureReason::none, updates, outer + 1);
    }
    if (growth > 1.0) {
      dual = dual.with_penalties(dual.mu() * growth, dual.nu() * growth);
      rec.record(TraceEvent::mu_update, outer, state.cached, dual.lambda(), dual.kappa());
    }
    merit.set_dual(dual);
    state = make_newton_state(merit, state.cached.source, opts.newton);
  }
}

Solution solve_any_aula(const ConstrainedProblem& problem, const VectorXd& x0,
                        const SolverOptions& opts) {
  opts.validate();
  check_start(problem, x0);

  Recorder rec(problem);
  const double growth = opts.effective_mu_growth();
  DualState dual = DualState::zeros(problem.dim_g(), problem.dim_h(), opts.mu0, opts.nu0);
  AugmentedLagrangian merit(problem, dual, opts.hessian_mode);
  NewtonState state = make_newton_state(merit, x0, opts.newton);
  NewtonParams params = opts.newton;
  int updates = 0;
  int accepted_since_update = 0;
  const bool constrained = problem.dim_g() + problem.dim_h() > 0;

  for (;;) {
    const StepOutcome outcome = newton_step(state, merit, params);
    rec.record(outcome == StepOutcome::rejected ? TraceEvent::newton_reject
                                                : TraceEvent::newton_step,
               updates, state.cached, dual.lambda(), dual.kappa());
    params.delta *= opts.delta_double;

    if (outcome == StepOutcome::gradient_failure) {
      return rec.finish(state.cached.source, dual, SolveStatus::failed,
                        FailureReason::gradient_failure, updates, updates);
    }
    if (outcome == StepOutcome::budget_exhausted) {
      return rec.finish(state.cached.source, dual, SolveStatus::max_iter, FailureReason::none,
                        updates, updates);
    }
    if (outcome == StepOutcome::rejected) continue;
    ++accepted_since_update;

    if (!constrained) {
      if (outcome == StepOutcome::converged && kkt_residuals(state.cached.source, dual).max() <
                                                   opts.outer_tol) {
        return rec.finish(state.cached.source, dual, SolveStatus::converged,
                          FailureReason::none, 0, 0);
      }
      continue;
    }

    const bool ready = opts.anytime_steps_per_update > 0
                           ? accepted_since_update >= opts.anytime_steps_per_update ||
                                 outcome == StepOutcome::converged
                           : outcome == StepOutcome::converged;
    if (!ready) continue;

    DualUpdateResult upd = anytime_update(state.cached, dual, opts.row_selection);
    if (upd.fell_back_to_centered) {
      rec.record(TraceEvent::fallback, updates, state.cached, dual.lambda(), dual.kappa());
    }
    dual = dual.with_multipliers(std::move(upd.lambda_new), std::move(upd.kappa_new));
    ++updates;
    rec.record(TraceEvent::dual_update, updates, state.cached, dual.lambda(), dual.kappa());

    const ProblemEval& at = state.cached.source;
    if (kkt_residuals(at, dual).max() < opts.outer_tol) {
      return rec.finish(at, dual, SolveStatus::converged, FailureReason::none, updates, updates);
    }
    if (updates >= opts.max_outer) {
      return rec.finish(at, dual, SolveStatus::max_iter, FailureReason::none, updates, updates);
    }
    if (growth > 1.0) {
      dual = dual.with_penalties(dual.mu() * growth, dual.nu() * growth);
      rec.record(TraceEvent::mu_update, updates, state.cached, dual.lambda(), dual.kappa());
    }
    merit.set_dual(dual);
    replace_cached_eval(state, merit.complete(state.cached.source));
    if (opts.reset_delta) params.delta = opts.newton.delta;
    accepted_since_update = 0;
  }
}

Solution solve_logbarrier(const ConstrainedProblem& problem, const VectorXd& x0,
                          const SolverOptions& opts) {
  opts.validate();
  check_start(problem, x0);

  Recorder rec(problem);
  const int m = problem.dim_g();
  const int l = problem.dim_h();
  ProblemEval start = problem.evaluate(x0);
  const DualState none = DualState::zeros(m, l, opts.mu0, opts.nu0);
  if (m > 0 && start.g.maxCoeff() >= 0.0) {
    return rec.finish(start, none, SolveStatus::failed, FailureReason::infeasible_start, 0, 0);
  }

  double tau = opts.barrier_mu0;
  double nu = opts.nu0;
  LogBarrierMerit merit(problem, tau, nu, opts.hessian_mode);
  NewtonState state = make_newton_state(merit, std::move(start), opts.newton);
  int updates = 0;

  auto estimates = [&](const ProblemEval& at, VectorXd& lambda, VectorXd& kappa) {
    lambda = (tau / (-at.g.array())).matrix();
    kappa = 2.0 * nu * at.h;
  };

  for (int outer = 0;; ++outer) {
    VectorXd lambda, kappa;
    estimates(state.cached.source, lambda, kappa);
    NewtonResult inner = run_inner(merit, std::move(state), opts.newton, rec, outer, lambda, kappa);
    state = std::move(inner.state);
    const ProblemEval& at = state.cached.source;
    estimates(at, lambda, kappa);
    const DualState dual = none.with_penalties(tau, nu);

    if (inner.outcome == StepOutcome::gradient_failure) {
      return rec.finish(at, dual, lambda, kappa, SolveStatus::failed,
                        FailureReason::gradient_failure, updates, outer + 1);
    }
    const double eq_violation = at.h.size() ? at.h.cwiseAbs().maxCoeff() : 0.0;
    if (inner.outcome == StepOutcome::converged && tau * m < opts.outer_tol &&
        eq_violation < opts.outer_tol) {
      return rec.finish(at, none.with_multipliers(lambda, kappa).with_penalties(tau, nu), lambda,
                        kappa, SolveStatus::converged, FailureReason::none, updates, outer + 1);
    }
    if (updates >= opts.max_outer) {
      return rec.finish(at, dual, lambda, kappa, SolveStatus::max_iter, FailureReason::none,
                        updates, outer + 1);
    }
    if (tau * m >= opts.outer_tol) tau *= opts.barrier_shrink;
    if (l > 0 && eq_violation >= opts.outer_tol) nu /= opts.barrier_shrink;
    ++updates;
    merit.set_weights(tau, nu);
    rec.record(TraceEvent::mu_update, outer, state.cached, lambda, kappa);
    state = make_newton_state(merit, state.cached.source, opts.newton);
  }
}

Solution solve_sqrpenalty(const ConstrainedProblem& problem, const VectorXd& x0,
                          const SolverOptions& opts) {
  opts.validate();
  check_start(problem, x0);
  if (problem.dim_g() + problem.dim_h() == 0) return solve_unconstrained(problem, x0, opts);

  Recorder rec(problem);
  const double growth = opts.effective_mu_growth();
  // With zero multipliers the augmented Lagrangian is exactly the squared penalty.
  DualState weights = DualState::zeros(problem.dim_g(), problem.dim_h(), opts.mu0, opts.nu0);
  AugmentedLagrangian merit(problem, weights, opts.hessian_mode);
  NewtonState state = make_newton_state(merit, x0, opts.newton);
  int updates = 0;

  auto estimates = [&](const ProblemEval& at, VectorXd& lambda, VectorXd& kappa) {
    lambda = 2.0 * weights.mu() * at.g.cwiseMax(0.0);
    kappa = 2.0 * weights.nu() * at.h;
  };

  for (int outer = 0;; ++outer) {
    VectorXd lambda, kappa;
    estimates(state.cached.source, lambda, kappa);
    NewtonResult inner = run_inner(merit, std::move(state), opts.newton, rec, outer, lambda, kappa);
    state = std::move(inner.state);
    const ProblemEval& at = state.cached.source;
    estimates(at, lambda, kappa);

    if (inner.outcome == StepOutcome::gradient_failure) {
      return rec.finish(at, weights, lambda, kappa, SolveStatus::failed,
                        FailureReason::gradient_failure, updates, outer + 1);
    }
    if (inner.outcome == StepOutcome::converged && constraint_violation(at) < opts.outer_tol) {
      return rec.finish(at, weights.with_multipliers(lambda, kappa), lambda, kappa,
                        SolveStatus::converged, FailureReason::none, updates, outer + 1);
    }
    if (updates >= opts.max_outer) {
      return rec.finish(at, weights, lambda, kappa, SolveStatus::max_iter, FailureReason::none,
                        updates, outer + 1);
    }
    weights = weights.with_penalties(weights.mu() * growth, weights.nu() * growth);
    ++updates;
    merit.set_dual(weights);
    rec.record(TraceEvent::mu_update, outer, state.cached, lambda, kappa);
    state = make_newton_state(merit, state.cached.source, opts.newton);
  }
}

Solution solve(const ConstrainedProblem& problem, const VectorXd& x0, const SolverOptions& opts) {
  switch (opts.method) {
    case Method::aula:
      return solve_aula(problem, x0, opts);
    case Method::any_aula:
      return solve_any_aula(problem, x0, opts);
    case Method::log_barrier:
      return solve_logbarrier(problem, x0, opts);
    case Method::sqr_penalty:
      return solve_sqrpenalty(problem, x0, opts);
  }
  throw std::invalid_argument("unknown method");
}

}  // namespace aula
