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

#include "aula/benchmark.hpp"
#include "aula/lp_oracle.hpp"
#include "aula/random_lp.hpp"
#include "aula/toy_trajectory.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace aula;

namespace {

VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

QuadraticProgram lp_from_matrix(const MatrixXd& G) {
  const Eigen::Index n = G.cols() - 1;
  QuadraticProgram lp;
  lp.c = VectorXd::Ones(n);
  lp.A_ineq = G.rightCols(n);
  lp.b_ineq = G.col(0);
  return lp;
}

BenchmarkConfig small_lp_config() {
  BenchmarkConfig config;
  RandomLpFamily family;
  family.n_list = {3};
  family.repetitions = 10;
  family.base_seed = 7;
  config.random_lp = family;
  return config;
}

}  // namespace

// ---- random LP generator ----

TEST(RandomLp, NegateAbsMakesOriginStrictlyFeasible) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ConstrainedProblem lp = gen_random_lp({4, 12, seed});
    EXPECT_LE(lp.evaluate(VectorXd::Zero(4)).g.maxCoeff(), -1.0) << seed;
  }
}

TEST(RandomLp, SameSeedSameMatrix) {
  EXPECT_EQ(random_lp_matrix({5, 15, 42}), random_lp_matrix({5, 15, 42}));
  EXPECT_NE(random_lp_matrix({5, 15, 42}), random_lp_matrix({5, 15, 43}));
}

TEST(RandomLp, FirstSamplesAreFrozen) {
  GaussianSampler rng(0);
  EXPECT_EQ(rng.normal(), 1.912804529284321);
  EXPECT_EQ(rng.normal(), -0.094479561125843076);
  EXPECT_EQ(mix_seed(1, 2), 17911839290282890590ULL);
  EXPECT_NE(mix_seed(1, 2), mix_seed(2, 1));
  const MatrixXd G = random_lp_matrix({2, 6, 7});
  EXPECT_EQ(G(0, 0), -1.7130298338875811);
  EXPECT_EQ(G(5, 2), -0.0038858654323341338);
}

TEST(RandomLp, OneDimensionalHandExample) {
  // G = (-1.5, -1): -1.5 - x <= 0, so min x is attained at x = -1.5 with lambda = 1.
  MatrixXd G(1, 2);
  G << -1.5, -1.0;
  const LpOracleResult r = lp_oracle(lp_from_matrix(G));
  ASSERT_EQ(r.status, OracleStatus::optimal);
  EXPECT_DOUBLE_EQ(r.x_star[0], -1.5);
  EXPECT_DOUBLE_EQ(r.lambda_star[0], 1.0);

  const ConstrainedProblem p = ConstrainedProblem::from_program(lp_from_matrix(G));
  SolverOptions opts;
  const Solution sol = solve_aula(p, vec({0.0}), opts);
  ASSERT_EQ(sol.status, SolveStatus::converged);
  EXPECT_NEAR(sol.x_final[0], -1.5, 1e-4);
  EXPECT_NEAR(sol.dual_final.lambda()[0], 1.0, 1e-4);
}

TEST(RandomLp, BoundednessAgreesWithOracle) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const QuadraticProgram prog = random_lp_program({3, 9, seed});
    const LpOracleResult r = lp_oracle(prog);
    EXPECT_EQ(lp_is_bounded(prog), r.status == OracleStatus::optimal) << seed;
  }
}

TEST(RandomLp, NonnegativeLeastSquaresKnownSolution) {
  MatrixXd M(3, 2);
  M << 1.0, 0.0,  //
      0.0, 1.0,   //
      0.0, 0.0;
  const VectorXd z = nonnegative_least_squares(M, vec({2.0, -1.0, 5.0}));
  EXPECT_NEAR(z[0], 2.0, 1e-12);
  EXPECT_EQ(z[1], 0.0);
}

TEST(RandomLp, OffsetModeNames) {
  EXPECT_EQ(parse_offset_mode("shift"), OffsetMode::shift);
  EXPECT_EQ(to_string(OffsetMode::negate_abs), "negate_abs");
  EXPECT_THROW(parse_offset_mode("abs"), std::invalid_argument);
}

// ---- LP oracle ----

TEST(LpOracle, SingleRowLowerBound) {
  // min x s.t. -x - 1 <= 0
  QuadraticProgram lp;
  lp.c = vec({1.0});
  lp.A_ineq = MatrixXd::Constant(1, 1, -1.0);
  lp.b_ineq = vec({-1.0});
  const LpOracleResult r = lp_oracle(lp);
  ASSERT_EQ(r.status, OracleStatus::optimal);
  EXPECT_DOUBLE_EQ(r.x_star[0], -1.0);
  EXPECT_DOUBLE_EQ(r.lambda_star[0], 1.0);
  EXPECT_DOUBLE_EQ(r.optimal_value, -1.0);
  EXPECT_EQ(r.active_set, std::vector<int>{0});
}

TEST(LpOracle, UnboundedDirectionIsCertified) {
  // min x s.t. x - 1 <= 0
  QuadraticProgram lp;
  lp.c = vec({1.0});
  lp.A_ineq = MatrixXd::Ones(1, 1);
  lp.b_ineq = vec({-1.0});
  const LpOracleResult r = lp_oracle(lp);
  ASSERT_EQ(r.status, OracleStatus::unbounded);
  EXPECT_LT(r.ray[0], 0.0);
}

TEST(LpOracle, InfeasibleSystem) {
  // x <= -1 and x >= 1
  QuadraticProgram lp;
  lp.c = vec({1.0});
  lp.A_ineq = vec({1.0, -1.0});
  lp.b_ineq = vec({1.0, 1.0});
  EXPECT_EQ(lp_oracle(lp).status, OracleStatus::infeasible);
}

TEST(LpOracle, FrozenRandomInstanceMatchesBarrierSolve) {
  const QuadraticProgram prog = random_lp_program({2, 6, 7});
  const LpOracleResult r = lp_oracle(prog);
  if (r.status != OracleStatus::optimal) GTEST_SKIP() << "instance is unbounded";
  const ConstrainedProblem p = ConstrainedProblem::from_program(prog);
  SolverOptions opts;
  opts.method = Method::log_barrier;
  opts.outer_tol = 1e-6;
  const Solution sol = solve(p, VectorXd::Zero(2), opts);
  ASSERT_EQ(sol.status, SolveStatus::converged);
  EXPECT_LT((sol.x_final - r.x_star).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_NEAR(sol.f_final, r.optimal_value, 1e-3);
}

TEST(LpOracle, KktHoldsAtCertifiedOptimum) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const QuadraticProgram prog = random_lp_program({3, 9, seed});
    const LpOracleResult r = lp_oracle(prog);
    if (r.status != OracleStatus::optimal) continue;
    const ConstrainedProblem p = ConstrainedProblem::from_program(prog);
    const KktResiduals k = kkt_residuals(p.evaluate(r.x_star), r.lambda_star, r.kappa_star);
    EXPECT_LT(k.max(), 1e-9) << seed;
  }
}

// ---- toy trajectory ----

TEST(ToyTrajectory, NoObstaclesStraightLineIsOptimal) {
  ToyTrajectorySpec spec;
  spec.T = 10;
  spec.d = 2;
  spec.start = vec({0.0, 0.0});
  spec.goal = vec({9.0, 3.0});
  const ConstrainedProblem p = gen_toy_trajectory(spec);
  EXPECT_EQ(p.dim_g(), 0);
  EXPECT_EQ(p.dim_h(), 4);
  const VectorXd line = straight_line_trajectory(spec);
  const ProblemEval e = p.evaluate(line);
  EXPECT_LT(e.grad_f.cwiseAbs().segment(2, 16).maxCoeff(), 1e-12);
  EXPECT_LT(e.h.cwiseAbs().maxCoeff(), 1e-15);
  // 9 segments of squared length 1 + 1/9.
  EXPECT_NEAR(e.f, 9.0 * (1.0 + 1.0 / 9.0), 1e-12);

  SolverOptions opts;
  const Solution sol = solve(p, VectorXd::Zero(20), opts);
  ASSERT_EQ(sol.status, SolveStatus::converged);
  EXPECT_LT((sol.x_final - line).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(ToyTrajectory, StartEqualsGoalHasZeroCost) {
  ToyTrajectorySpec spec;
  spec.T = 5;
  spec.start = vec({1.0, 1.0});
  spec.goal = vec({1.0, 1.0});
  const ConstrainedProblem p = gen_toy_trajectory(spec);
  const ProblemEval e = p.evaluate(straight_line_trajectory(spec));
  EXPECT_EQ(e.f, 0.0);
  EXPECT_EQ(constraint_violation(e), 0.0);
}

TEST(ToyTrajectory, ObstacleRowsAndDetour) {
  const ToyTrajectorySpec spec = random_toy_trajectory(3, 20, 2, 1, 19.0);
  const ConstrainedProblem p = gen_toy_trajectory(spec);
  EXPECT_EQ(p.dim_g(), 20);
  const VectorXd line = straight_line_trajectory(spec);
  const ProblemEval at_line = p.evaluate(line);
  EXPECT_GT(at_line.g.maxCoeff(), 0.0);

  SolverOptions opts;
  opts.mu0 = 100.0;
  opts.nu0 = 100.0;
  const Solution sol = solve(p, line, opts);
  ASSERT_EQ(sol.status, SolveStatus::converged);
  EXPECT_LT(sol.violation, 1e-3);
  EXPECT_GT(sol.f_final, at_line.f);
}

TEST(ToyTrajectory, DerivativesMatchFiniteDifferences) {
  const ToyTrajectorySpec spec = random_toy_trajectory(5, 8, 2, 2);
  const ConstrainedProblem p = gen_toy_trajectory(spec);
  GaussianSampler rng(9);
  VectorXd x = straight_line_trajectory(spec);
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += rng.normal();
  EXPECT_LT(check_gradients_fd(p, x).max_error(), 1e-4);
}

TEST(ToyTrajectory, InvalidSpecIsRejected) {
  ToyTrajectorySpec spec;
  spec.T = 2;
  spec.start = vec({0.0, 0.0});
  spec.goal = vec({1.0, 0.0});
  EXPECT_THROW(gen_toy_trajectory(spec), std::invalid_argument);
  EXPECT_THROW(random_toy_trajectory(1, 10, 1, 1), std::invalid_argument);
}

// ---- benchmark runner ----

TEST(Benchmark, RowAndAggregateCounts) {
  const BenchmarkTable table = run_benchmark(small_lp_config());
  EXPECT_EQ(table.rows.size(), 40u);
  ASSERT_EQ(table.aggregates.size(), 4u);
  EXPECT_EQ(table.aggregates[0].method, Method::any_aula);
  for (const auto& agg : table.aggregates) EXPECT_EQ(agg.instances, 10);
  for (size_t i = 0; i < table.rows.size(); ++i) {
    EXPECT_EQ(table.rows[i].instance, static_cast<int>(i / 4));
    EXPECT_EQ(table.rows[i].m, 9);
  }
}

TEST(Benchmark, CsvIsReproducibleAcrossJobCounts) {
  BenchmarkConfig config = small_lp_config();
  std::ostringstream a, b, c;
  write_benchmark_csv(a, run_benchmark(config));
  write_benchmark_csv(b, run_benchmark(config));
  config.jobs = 3;
  write_benchmark_csv(c, run_benchmark(config));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str(), c.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "method,family,n,m,seed,f_evals,dual_updates,f_final,suboptimality,violation,status");
}

TEST(Benchmark, BestMethodHasZeroSuboptimality) {
  const BenchmarkTable table = run_benchmark(small_lp_config());
  for (int inst = 0; inst < 10; ++inst) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& row : table.rows) {
      if (row.instance == inst && std::isfinite(row.suboptimality)) {
        best = std::min(best, row.suboptimality);
        EXPECT_GE(row.suboptimality, 0.0);
      }
    }
    EXPECT_EQ(best, 0.0) << inst;
  }
}

TEST(Benchmark, MeanStderrSkipsNonFinite) {
  const MeanStderr s = mean_stderr({1.0, 3.0, std::nan(""), 5.0});
  EXPECT_EQ(s.count, 3);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_DOUBLE_EQ(s.stderr_, 2.0 / std::sqrt(3.0));
  EXPECT_EQ(mean_stderr({}).count, 0);
}

TEST(Benchmark, ConfigParsing) {
  const nlohmann::json doc = nlohmann::json::parse(R"({
    "methods": ["aula", "sqr_penalty"],
    "jobs": 2,
    "solver": {"outer_tol": 1e-5, "newton": {"rho": 0.05}},
    "families": {
      "random_lp": {"n_list": [2, 4], "m_rule": 2, "repetitions": 3, "base_seed": 9},
      "toy_traj": {"T": 12, "repetitions": 2, "solver": {"mu0": 10}}
    }
  })");
  const BenchmarkConfig config = parse_benchmark_config(doc);
  EXPECT_EQ(config.methods, (std::vector<Method>{Method::aula, Method::sqr_penalty}));
  EXPECT_EQ(config.jobs, 2);
  EXPECT_DOUBLE_EQ(config.solver.outer_tol, 1e-5);
  EXPECT_DOUBLE_EQ(config.solver.newton.rho, 0.05);
  ASSERT_TRUE(config.random_lp.has_value());
  EXPECT_EQ(config.random_lp->n_list, (std::vector<int>{2, 4}));
  EXPECT_DOUBLE_EQ(config.random_lp->m_rule, 2.0);
  ASSERT_TRUE(config.toy_traj.has_value());
  EXPECT_EQ(config.toy_traj->T, 12);
  EXPECT_EQ(config.toy_traj->solver_overrides["mu0"], 10);
  EXPECT_EQ(config.toy_traj->solver_overrides["nu0"], 100.0);
}

TEST(Benchmark, UnknownSolverKeyIsRejected) {
  SolverOptions opts;
  EXPECT_THROW(apply_solver_overrides(nlohmann::json{{"mu_zero", 1.0}}, opts),
               std::invalid_argument);
  apply_solver_overrides(nlohmann::json{{"method", "log_barrier"}, {"max_outer", 7}}, opts);
  EXPECT_EQ(opts.method, Method::log_barrier);
  EXPECT_EQ(opts.max_outer, 7);
}
