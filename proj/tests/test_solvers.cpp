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

#include "aula/lp_oracle.hpp"
#include "aula/random_lp.hpp"
#include "aula/solvers.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace aula;

namespace {

VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

// min x s.t. 1 - x <= 0
ConstrainedProblem half_line() {
  QuadraticProgram prog;
  prog.c = vec({1.0});
  prog.A_ineq = MatrixXd::Constant(1, 1, -1.0);
  prog.b_ineq = vec({1.0});
  return ConstrainedProblem::from_program(prog);
}

// min x^2 s.t. x - 3 = 0
ConstrainedProblem pinned_quadratic() {
  QuadraticProgram prog;
  prog.Q = MatrixXd::Constant(1, 1, 2.0);
  prog.c = vec({0.0});
  prog.A_eq = MatrixXd::Ones(1, 1);
  prog.b_eq = vec({-3.0});
  return ConstrainedProblem::from_program(prog);
}

SolverOptions options(Method method) {
  SolverOptions opts;
  opts.method = method;
  return opts;
}

SolverOptions tight(Method method) {
  SolverOptions opts = options(method);
  opts.outer_tol = 1e-8;
  opts.newton.delta = 1e-10;
  return opts;
}

}  // namespace

TEST(SolveAula, HalfLineFirstInnerSolveThenExactMultiplier) {
  const ConstrainedProblem p = half_line();
  const Solution sol = solve_aula(p, vec({0.0}), tight(Method::aula));
  ASSERT_EQ(sol.status, SolveStatus::converged);
  EXPECT_NEAR(sol.x_final[0], 1.0, 1e-8);
  EXPECT_NEAR(sol.dual_final.lambda()[0], 1.0, 1e-8);
  EXPECT_GE(sol.dual_updates, 1);

  // The first recorded dual update happens at the inner optimum x = 0.5.
  SolverOptions one = tight(Method::aula);
  one.max_outer = 1;
  const Solution first = solve_aula(p, vec({0.0}), one);
  EXPECT_NEAR(first.x_final[0], 0.5, 1e-8);
  EXPECT_NEAR(first.dual_final.lambda()[0], 1.0, 1e-8);
  EXPECT_EQ(first.status, SolveStatus::max_iter);
}

TEST(SolveAula, UnconstrainedIsOneNewtonSolve) {
  QuadraticProgram prog;
  prog.Q = MatrixXd::Identity(2, 2);
  prog.c = vec({-1.0, 2.0});
  const ConstrainedProblem p = ConstrainedProblem::from_program(prog);
  const Solution sol = solve_aula(p, vec({5.0, 5.0}), tight(Method::aula));
  ASSERT_EQ(sol.status, SolveStatus::converged);
  EXPECT_LT((sol.x_final - vec({1.0, -2.0})).cwiseAbs().maxCoeff(), 1e-8);

  const ConstrainedProblem q = ConstrainedProblem::from_program(prog);
  const NewtonResult direct =
      newton_minimize(AugmentedLagrangian(q, DualState::zeros(0, 0)), vec({5.0, 5.0}),
                      tight(Method::aula).newton);
  EXPECT_EQ(sol.f_evals, direct.state.eval_count);
}

TEST(SolveAula, EqualityMultiplierConverges) {
  const ConstrainedProblem p = pinned_quadratic();
  SolverOptions opts = options(Method::aula);
  opts.outer_tol = 1e-6;
  opts.newton.delta = 1e-8;
  const Solution sol = solve_aula(p, vec({0.0}), opts);
  ASSERT_EQ(sol.status, SolveStatus::converged);
  EXPECT_NEAR(sol.x_final[0], 3.0, 1e-6);
  EXPECT_NEAR(sol.dual_final.kappa()[0], -6.0, 1e-5);
}

TEST(SolveAula, EvaluationCountMatchesProblemCounter) {
  const ConstrainedProblem lp = gen_random_lp({4, 12, 3});
  const std::int64_t before = lp.evaluation_count();
  const Solution sol = solve_aula(lp, VectorXd::Zero(4), options(Method::aula));
  EXPECT_EQ(sol.f_evals, lp.evaluation_count() - before);
}

TEST(SolveAula, MaxOuterStopsWithMaxIter) {
  const ConstrainedProblem lp = gen_random_lp({5, 15, 4});
  SolverOptions opts = options(Method::aula);
  opts.max_outer = 2;
  opts.outer_tol = 1e-12;
  const Solution sol = solve_aula(lp, VectorXd::Zero(5), opts);
  EXPECT_EQ(sol.status, SolveStatus::max_iter);
  EXPECT_LE(sol.dual_updates, 2);
}

TEST(SolveAnyAula, HalfLineConvergesWithFewerEvaluations) {
  const ConstrainedProblem p = half_line();
  const Solution any = solve_any_aula(p, vec({0.0}), options(Method::any_aula));
  const Solution nested = solve_aula(p, vec({0.0}), options(Method::aula));
  ASSERT_EQ(any.status, SolveStatus::converged);
  EXPECT_NEAR(any.x_final[0], 1.0, 1e-4);
  EXPECT_NEAR(any.dual_final.lambda()[0], 1.0, 1e-4);
  EXPECT_LE(any.f_evals, nested.f_evals);
}

TEST(SolveAnyAula, TraceRecordsDualUpdates) {
  const ConstrainedProblem lp = gen_random_lp({3, 9, 5});
  const Solution sol = solve_any_aula(lp, VectorXd::Zero(3), options(Method::any_aula));
  ASSERT_EQ(sol.status, SolveStatus::converged);
  EXPECT_EQ(sol.trace.count(TraceEvent::dual_update), sol.dual_updates);
  std::ostringstream os;
  sol.trace.write_csv(os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
            "outer_iter,inner_evals,merit,stationarity,primal_ineq,primal_eq,complementarity,"
            "lambda_inf,event");
}

TEST(SolveLogBarrier, HalfLineFromInteriorPoint) {
  const ConstrainedProblem p = half_line();
  const Solution sol = solve_logbarrier(p, vec({3.0}), options(Method::log_barrier));
  ASSERT_EQ(sol.status, SolveStatus::converged);
  EXPECT_NEAR(sol.x_final[0], 1.0, 1e-4);
  EXPECT_GT(sol.x_final[0], 1.0);
  EXPECT_EQ(sol.violation, 0.0);
}

TEST(SolveLogBarrier, InfeasibleStartFails) {
  const ConstrainedProblem p = half_line();
  const Solution sol = solve_logbarrier(p, vec({0.0}), options(Method::log_barrier));
  EXPECT_EQ(sol.status, SolveStatus::failed);
  EXPECT_EQ(sol.failure, FailureReason::infeasible_start);
}

TEST(SolveLogBarrier, EqualityOnlyProblem) {
  const ConstrainedProblem p = pinned_quadratic();
  const Solution sol = solve_logbarrier(p, vec({0.0}), options(Method::log_barrier));
  ASSERT_EQ(sol.status, SolveStatus::converged);
  EXPECT_NEAR(sol.x_final[0], 3.0, 1e-4);
}

TEST(SolveSqrPenalty, HalfLineApproachesFromOutside) {
  const ConstrainedProblem p = half_line();
  SolverOptions one = tight(Method::sqr_penalty);
  one.max_outer = 1;
  const Solution first = solve_sqrpenalty(p, vec({0.0}), one);
  // f + mu max(0, 1 - x)^2 is minimized at x = 1 - 1 / (2 mu); one increase gives mu = 2.
  EXPECT_EQ(first.status, SolveStatus::max_iter);
  EXPECT_EQ(first.dual_updates, 1);
  EXPECT_NEAR(first.x_final[0], 0.75, 1e-8);

  const Solution sol = solve_sqrpenalty(p, vec({0.0}), options(Method::sqr_penalty));
  ASSERT_EQ(sol.status, SolveStatus::converged);
  EXPECT_LT(sol.x_final[0], 1.0);
  EXPECT_GT(sol.violation, 0.0);
  EXPECT_LT(sol.violation, 1e-4);
}

TEST(SolveSqrPenalty, UnconstrainedIsOneSolve) {
  QuadraticProgram prog;
  prog.Q = MatrixXd::Identity(2, 2);
  prog.c = vec({1.0, 1.0});
  const ConstrainedProblem p = ConstrainedProblem::from_program(prog);
  const Solution sol = solve_sqrpenalty(p, vec({0.0, 0.0}), options(Method::sqr_penalty));
  ASSERT_EQ(sol.status, SolveStatus::converged);
  EXPECT_EQ(sol.dual_updates, 0);
  EXPECT_LT((sol.x_final - vec({-1.0, -1.0})).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Solve, EveryMethodMatchesOracleOnSmallLp) {
  std::uint64_t seed = 17;
  while (!lp_is_bounded(random_lp_program({3, 9, seed}))) ++seed;
  const QuadraticProgram prog = random_lp_program({3, 9, seed});
  const LpOracleResult oracle = lp_oracle(prog);
  ASSERT_EQ(oracle.status, OracleStatus::optimal);
  for (Method m : {Method::aula, Method::any_aula, Method::log_barrier, Method::sqr_penalty}) {
    SolverOptions opts = options(m);
    opts.outer_tol = 1e-5;
    const ConstrainedProblem p = ConstrainedProblem::from_program(prog);
    const Solution sol = solve(p, VectorXd::Zero(3), opts);
    ASSERT_EQ(sol.status, SolveStatus::converged) << to_string(m);
    EXPECT_LT((sol.x_final - oracle.x_star).cwiseAbs().maxCoeff(), 1e-3) << to_string(m);
    EXPECT_LT(sol.violation, 1e-4) << to_string(m);
  }
}

TEST(SolverOptionsTest, ParseAndValidate) {
  EXPECT_EQ(parse_method("any_aula"), Method::any_aula);
  EXPECT_EQ(parse_method(to_string(Method::sqr_penalty)), Method::sqr_penalty);
  EXPECT_THROW(parse_method("newton"), std::invalid_argument);
  SolverOptions opts;
  EXPECT_DOUBLE_EQ(opts.effective_mu_growth(), 1.0);
  opts.method = Method::sqr_penalty;
  EXPECT_DOUBLE_EQ(opts.effective_mu_growth(), 2.0);
  opts.outer_tol = -1.0;
  EXPECT_THROW(opts.validate(), std::invalid_argument);
}

TEST(SolveAula, WarmStartAtOptimalMultiplierNeedsOneUpdate) {
  const ConstrainedProblem p = half_line();
  const Solution sol =
      solve_aula(p, vec({0.0}), DualState(vec({1.0}), VectorXd(0)), tight(Method::aula));
  ASSERT_EQ(sol.status, SolveStatus::converged);
  EXPECT_EQ(sol.dual_updates, 1);
  EXPECT_NEAR(sol.x_final[0], 1.0, 1e-8);
  EXPECT_THROW(solve_aula(p, vec({0.0}), DualState::zeros(2, 0), options(Method::aula)),
               std::invalid_argument);
}
