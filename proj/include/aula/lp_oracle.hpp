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

#include "aula/problem.hpp"

#include <string>
#include <vector>

namespace aula {

enum class OracleStatus { optimal, unbounded, infeasible };

std::string to_string(OracleStatus status);

struct LpOracleResult {
  VectorXd x_star;
  VectorXd lambda_star;
  VectorXd kappa_star;
  double optimal_value = 0.0;
  /// Inequality rows of the certifying basis.
  std::vector<int> active_set;
  /// Inequality rows with |g_i(x*)| <= 1e-9 (a superset of active_set at degenerate vertices).
  std::vector<int> tight_rows;
  OracleStatus status = OracleStatus::infeasible;
  /// Descent ray certifying unboundedness (status unbounded only).
  VectorXd ray;
};

/// Largest dimension the combinatorial enumeration accepts.
inline constexpr int kLpOracleMaxDim = 12;

/**
 * Brute-force LP solver: enumerates every basis of n - l inequality rows
 * plus all equality rows, keeps the feasible vertices and returns the
 * cheapest one whose basis has nonnegative multipliers. Unboundedness is
 * certified by a feasible ray d (A d <= 0, E d = 0) with c'd < 0, searched
 * over the one-dimensional kernels of (n-1)-row subsystems. Needs a linear
 * problem built from QuadraticProgram data with n <= kLpOracleMaxDim and a
 * constraint matrix of full column rank whenever the LP is bounded.
 */
LpOracleResult lp_oracle(const ConstrainedProblem& problem);
LpOracleResult lp_oracle(const QuadraticProgram& lp);

}  // namespace aula
