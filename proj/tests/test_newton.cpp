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
#include "aula/random_lp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace aula;

namespace {

VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

ConstrainedProblem unconstrained(int n, std::function<void(const VectorXd&, ProblemEval&)> obj) {
  Evaluator fn = [n, obj](const VectorXd& x, ProblemEval& out) {
    obj(x, out);
    out.g.resize(0);
    out.jac_g.resize(0, n);
    out.h.resize(0);
    out.jac_h.resize(0, n);
  };
  return ConstrainedProblem(n, 0, 0, fn);
}

ConstrainedProblem half_norm(int n) {
  return unconstrained(n, [n](const VectorXd& x, ProblemEval& out) {
    out.f = 0.5 * x.squaredNorm();
    out.grad_f = x;
    out.hess_f = MatrixXd::Identity(n, n);
  });
}

}  // namespace

TEST(NewtonMinimize, QuadraticHalvesEveryStep) {
  const ConstrainedProblem p = half_norm(2);
  const AugmentedLagrangian merit(p, DualState::zeros(0, 0));
  const NewtonParams params;
  const NewtonResult res = newton_minimize(merit, vec({4.0, -3.0}), params);

  ASSERT_EQ(res.outcome, StepOutcome::converged);
  // |x_k|_inf = 4 / 2^k and the step is half of that; the first step below
  // 1e-6 is taken from x_21.
  ASSERT_EQ(res.steps.size(), 22u);
  double expected_x0 = 4.0;
  double expected_x1 = -3.0;
  for (size_t k = 0; k < res.steps.size(); ++k) {
    expected_x0 *= 0.5;
    expected_x1 *= 0.5;
    EXPECT_EQ(res.steps[k].alpha, 1.0);
    EXPECT_EQ(res.steps[k].beta, 1.0);
    EXPECT_NEAR(res.steps[k].value, 0.5 * (expected_x0 * expected_x0 + expected_x1 * expected_x1),
                1e-12);
  }
  EXPECT_NEAR(res.x[0], expected_x0, 1e-12);
  EXPECT_NEAR(res.x[1], expected_x1, 1e-12);
  EXPECT_EQ(res.state.eval_count, 23);
  EXPECT_EQ(p.evaluation_count(), 23);
}

TEST(NewtonStep, FreshStateAcceptsAndCountsOneEvaluation) {
  const ConstrainedProblem p = half_norm(2);
  const AugmentedLagrangian merit(p, DualState::zeros(0, 0));
  const NewtonParams params;
  NewtonState state = make_newton_state(merit, vec({4.0, -3.0}), params);
  EXPECT_EQ(state.eval_count, 1);
  EXPECT_EQ(newton_step(state, merit, params), StepOutcome::accepted);
  EXPECT_EQ(state.eval_count, 2);
  EXPECT_LT((state.x - vec({2.0, -1.5})).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(state.cached.x(), state.x);
}

TEST(NewtonStep, AtMinimizerConvergesImmediately) {
  const ConstrainedProblem p = half_norm(3);
  const AugmentedLagrangian merit(p, DualState::zeros(0, 0));
  const NewtonParams params;
  NewtonState state = make_newton_state(merit, VectorXd::Zero(3), params);
  EXPECT_EQ(newton_step(state, merit, params), StepOutcome::converged);
  EXPECT_EQ(state.last_step_norm, 0.0);
}

TEST(NewtonStep, RejectionKeepsXAndShrinksAlpha) {
  // sqrt(1 + x^2) is nearly flat far out, so an undamped Newton step overshoots.
  const ConstrainedProblem p = unconstrained(1, [](const VectorXd& x, ProblemEval& out) {
    const double s = std::sqrt(1.0 + x[0] * x[0]);
    out.f = s;
    out.grad_f = VectorXd::Constant(1, x[0] / s);
    out.hess_f = MatrixXd::Constant(1, 1, 1.0 / (s * s * s));
  });
  const AugmentedLagrangian merit(p, DualState::zeros(0, 0));
  NewtonParams params;
  params.beta0 = 1e-8;
  NewtonState state = make_newton_state(merit, vec({10.0}), params);
  EXPECT_EQ(newton_step(state, merit, params), StepOutcome::rejected);
  EXPECT_EQ(state.x, vec({10.0}));
  EXPECT_DOUBLE_EQ(state.alpha, 0.1);
  EXPECT_EQ(state.eval_count, 2);
}

TEST(NewtonMinimize, WrongGradientSignFails) {
  const ConstrainedProblem p = unconstrained(2, [](const VectorXd& x, ProblemEval& out) {
    out.f = 0.5 * x.squaredNorm();
    out.grad_f = -x;
    out.hess_f = MatrixXd::Identity(2, 2);
  });
  const AugmentedLagrangian merit(p, DualState::zeros(0, 0));
  const NewtonResult res = newton_minimize(merit, vec({1.0, 1.0}), NewtonParams{});
  EXPECT_EQ(res.outcome, StepOutcome::gradient_failure);
  EXPECT_EQ(res.x, vec({1.0, 1.0}));
}

TEST(NewtonStep, IndefiniteSystemRaisesDampingWithoutEvaluating) {
  const ConstrainedProblem p = unconstrained(1, [](const VectorXd& x, ProblemEval& out) {
    out.f = -x[0] * x[0];
    out.grad_f = VectorXd::Constant(1, -2.0 * x[0]);
    out.hess_f = MatrixXd::Constant(1, 1, -2.0);
  });
  const AugmentedLagrangian merit(p, DualState::zeros(0, 0));
  const NewtonParams params;
  NewtonState state = make_newton_state(merit, vec({1.0}), params);
  EXPECT_EQ(newton_step(state, merit, params), StepOutcome::rejected);
  EXPECT_EQ(state.eval_count, 1);
  EXPECT_DOUBLE_EQ(state.beta, 10.0);
}

TEST(NewtonMinimize, BudgetIsRespected) {
  const ConstrainedProblem p = half_norm(2);
  const AugmentedLagrangian merit(p, DualState::zeros(0, 0));
  NewtonParams params;
  params.max_evals = 5;
  const NewtonResult res = newton_minimize(merit, vec({4.0, -3.0}), params);
  EXPECT_EQ(res.outcome, StepOutcome::budget_exhausted);
  EXPECT_EQ(res.state.eval_count, 5);
}

TEST(NewtonMinimize, PenalizedLpDecreasesMonotonically) {
  const ConstrainedProblem lp = gen_random_lp({5, 15, 21});
  const AugmentedLagrangian merit(lp, DualState::zeros(15, 0));
  const NewtonResult res = newton_minimize(merit, VectorXd::Zero(5), NewtonParams{});
  ASSERT_EQ(res.outcome, StepOutcome::converged);
  double previous = 0.0;
  for (const auto& step : res.steps) {
    EXPECT_LE(step.value, previous);
    previous = step.value;
    EXPECT_EQ(step.beta, 1.0);
  }
  EXPECT_EQ(res.state.eval_count, lp.evaluation_count());
}

TEST(ReplaceCachedEval, IdenticalEvaluationLeavesStateUnchanged) {
  const ConstrainedProblem p = half_norm(2);
  const AugmentedLagrangian merit(p, DualState::zeros(0, 0));
  const NewtonParams params;
  NewtonState state = make_newton_state(merit, vec({1.0, 2.0}), params);
  newton_step(state, merit, params);
  const NewtonState before = state;
  replace_cached_eval(state, before.cached);
  EXPECT_EQ(state.x, before.x);
  EXPECT_EQ(state.alpha, before.alpha);
  EXPECT_EQ(state.beta, before.beta);
  EXPECT_EQ(state.eval_count, before.eval_count);
  EXPECT_EQ(state.cached.value, before.cached.value);
}

TEST(ReplaceCachedEval, DifferentPointIsRejected) {
  const ConstrainedProblem p = half_norm(2);
  const AugmentedLagrangian merit(p, DualState::zeros(0, 0));
  NewtonState state = make_newton_state(merit, vec({1.0, 2.0}), NewtonParams{});
  EXPECT_THROW(replace_cached_eval(state, merit.evaluate(vec({1.0, 2.5}))), std::invalid_argument);
}

TEST(ReplaceCachedEval, LineSearchComparesAgainstNewDuals) {
  // min x s.t. 1 - x <= 0, evaluated at x = 0.5 with lambda 0 and then 1.
  QuadraticProgram prog;
  prog.c = vec({1.0});
  prog.A_ineq = MatrixXd::Constant(1, 1, -1.0);
  prog.b_ineq = vec({1.0});
  const ConstrainedProblem p = ConstrainedProblem::from_program(prog);
  const NewtonParams params;
  AugmentedLagrangian merit(p, DualState::zeros(1, 0));
  NewtonState state = make_newton_state(merit, vec({0.5}), params);
  EXPECT_DOUBLE_EQ(state.cached.value, 0.75);

  merit.set_dual(DualState(vec({1.0}), VectorXd(0)));
  replace_cached_eval(state, merit.complete(state.cached.source));
  EXPECT_DOUBLE_EQ(state.cached.value, 1.25);
  EXPECT_EQ(newton_step(state, merit, params), StepOutcome::accepted);
  EXPECT_LT(state.cached.value, 1.25);
  EXPECT_EQ(p.evaluation_count(), 2);
}

TEST(NewtonParamsTest, ValidateRejectsBadValues) {
  NewtonParams params;
  EXPECT_NO_THROW(params.validate());
  params.rho = -0.1;
  EXPECT_THROW(params.validate(), std::invalid_argument);
  params = NewtonParams{};
  params.delta = 0.0;
  EXPECT_THROW(params.validate(), std::invalid_argument);
  params = NewtonParams{};
  params.max_evals = 0;
  EXPECT_THROW(params.validate(), std::invalid_argument);
}

TEST(NewtonTrace, CsvHasHeaderAndOneRowPerStep) {
  const ConstrainedProblem p = half_norm(1);
  const AugmentedLagrangian merit(p, DualState::zeros(0, 0));
  const NewtonResult res = newton_minimize(merit, vec({1.0}), NewtonParams{});
  std::ostringstream os;
  write_newton_trace_csv(os, res.steps);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "iteration,alpha,beta,step_norm,value,outcome");
  size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, res.steps.size());
}

TEST(PolishStationary, LandsOnPiecewiseQuadraticMinimizer) {
  const ConstrainedProblem lp = gen_random_lp({4, 12, 21});
  const AugmentedLagrangian merit(lp, DualState::zeros(12, 0));
  const NewtonResult res = newton_minimize(merit, VectorXd::Zero(4), NewtonParams{});
  const LagrangianEval polished = polish_stationary(merit, res.state.cached, 1e-12);
  EXPECT_LT(polished.gradient.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE(polished.gradient.cwiseAbs().maxCoeff(),
            res.state.cached.gradient.cwiseAbs().maxCoeff());
}

TEST(PolishStationary, KeepsStartWhenNoStepHelps) {
  const ConstrainedProblem p = half_norm(2);
  const AugmentedLagrangian merit(p, DualState::zeros(0, 0));
  const LagrangianEval start = merit.evaluate(vec({0.0, 0.0}));
  const LagrangianEval out = polish_stationary(merit, start, 1e-12);
  EXPECT_EQ(out.x(), start.x());
  EXPECT_EQ(p.evaluation_count(), 1);
}
