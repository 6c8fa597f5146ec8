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

#include <cmath>
#include <limits>
#include <stdexcept>

namespace aula {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kRcondMin = 1e-12;

// Calls visit(indices) for every k-subset of {0..m-1} in lexicographic order.
template <typename Visit>
void for_each_subset(int m, int k, Visit&& visit) {
  if (k < 0 || k > m) return;
  std::vector<int> idx(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
  for (;;) {
    visit(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<size_t>(i)] == m - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
  }
}

struct Basis {
  MatrixXd B;
  VectorXd rhs;
};

void fill_basis(const QuadraticProgram& lp, const std::vector<int>& rows, Basis& basis) {
  const int n = lp.dim_x();
  const int k = static_cast<int>(rows.size());
  const int l = static_cast<int>(lp.A_eq.rows());
  basis.B.resize(k + l, n);
  basis.rhs.resize(k + l);
  for (int r = 0; r < k; ++r) {
    basis.B.row(r) = lp.A_ineq.row(rows[static_cast<size_t>(r)]);
    basis.rhs[r] = -lp.b_ineq[rows[static_cast<size_t>(r)]];
  }
  if (l > 0) {
    basis.B.bottomRows(l) = lp.A_eq;
    basis.rhs.tail(l) = -lp.b_eq;
  }
}

Basis build_basis(const QuadraticProgram& lp, const std::vector<int>& rows) {
  Basis basis;
  fill_basis(lp, rows, basis);
  return basis;
}

bool feasible(const QuadraticProgram& lp, const VectorXd& x, VectorXd& work) {
  const double scale = 1.0 + x.cwiseAbs().maxCoeff();
  if (lp.A_ineq.rows() > 0) {
    work.noalias() = lp.A_ineq * x;
    work += lp.b_ineq;
    if (work.maxCoeff() > kFeasTol * scale) return false;
  }
  if (lp.A_eq.rows() > 0 &&
      (lp.A_eq * x + lp.b_eq).cwiseAbs().maxCoeff() > kFeasTol * scale) {
    return false;
  }
  return true;
}

bool is_descent_ray(const QuadraticProgram& lp, const VectorXd& d) {
  const double scale = d.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return false;
  const VectorXd v = d / scale;
  if (lp.A_ineq.rows() > 0 && (lp.A_ineq * v).maxCoeff() > kFeasTol) return false;
  if (lp.A_eq.rows() > 0 && (lp.A_eq * v).cwiseAbs().maxCoeff() > kFeasTol) return false;
  return lp.c.dot(v) < -kFeasTol;
}

// Searches feasible descent rays; empty vector when none exists.
VectorXd find_descent_ray(const QuadraticProgram& lp) {
  const int n = lp.dim_x();
  const int m = static_cast<int>(lp.A_ineq.rows());
  const int l = static_cast<int>(lp.A_eq.rows());

  // Lineality space of the full constraint matrix.
  MatrixXd all(m + l, n);
  if (m > 0) all.topRows(m) = lp.A_ineq;
  if (l > 0) all.bottomRows(l) = lp.A_eq;
  if (m + l == 0) return lp.c.isZero(0.0) ? VectorXd() : VectorXd(-lp.c);
  Eigen::FullPivLU<MatrixXd> full(all);
  if (full.rank() < n) {
    const MatrixXd kernel = full.kernel();
    const VectorXd proj = kernel * (kernel.transpose() * kernel).ldlt().solve(kernel.transpose() * lp.c);
    if (is_descent_ray(lp, -proj)) return -proj;
  }

  VectorXd found;
  const int k = n - 1 - l;
  if (k < 0) return found;
  for_each_subset(m, k, [&](const std::vector<int>& rows) {
    if (found.size() > 0) return;
    const Basis basis = build_basis(lp, rows);
    VectorXd d;
    if (basis.B.rows() == 0) {
      if (n != 1) return;
      d = VectorXd::Ones(1);
    } else {
      Eigen::FullPivLU<MatrixXd> lu(basis.B);
      if (lu.rank() != n - 1) return;
      d = lu.kernel().col(0);
    }
    if (is_descent_ray(lp, d)) {
      found = d;
    } else if (is_descent_ray(lp, -d)) {
      found = -d;
    }
  });
  return found;
}

}  // namespace

std::string to_string(OracleStatus status) {
  switch (status) {
    case OracleStatus::optimal:
      return "optimal";
    case OracleStatus::unbounded:
      return "unbounded";
    case OracleStatus::infeasible:
      return "infeasible";
  }
  return "infeasible";
}

LpOracleResult lp_oracle(const ConstrainedProblem& problem) {
  if (problem.kind() != ProblemKind::lp || !problem.program_data()) {
    throw std::invalid_argument("lp_oracle needs a linear program");
  }
  return lp_oracle(*problem.program_data());
}

LpOracleResult lp_oracle(const QuadraticProgram& lp) {
  if (!lp.is_linear()) throw std::invalid_argument("lp_oracle needs a linear program");
  const int n = lp.dim_x();
  const int m = static_cast<int>(lp.A_ineq.rows());
  const int l = static_cast<int>(lp.A_eq.rows());
  if (n > kLpOracleMaxDim) {
    throw std::invalid_argument("lp_oracle enumerates bases only up to n = " +
                                std::to_string(kLpOracleMaxDim));
  }

  LpOracleResult result;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> ties;
  bool any_vertex = false;

  Basis basis;
  Eigen::PartialPivLU<MatrixXd> lu(n);
  VectorXd x(n);
  VectorXd work(m);
  for_each_subset(m, n - l, [&](const std::vector<int>& rows) {
    fill_basis(lp, rows, basis);
    lu.compute(basis.B);
    if (!(lu.rcond() > kRcondMin)) return;
    x = lu.solve(basis.rhs);
    if (!x.allFinite() || !feasible(lp, x, work)) return;
    any_vertex = true;
    const double value = lp.c.dot(x);
    const double tie_tol = kFeasTol * (1.0 + std::abs(value));
    if (value < best - tie_tol) {
      best = value;
      ties.clear();
      ties.push_back(rows);
    } else if (value <= best + tie_tol) {
      ties.push_back(rows);
    }
  });

  // A basis at a cheapest vertex with nonnegative multipliers certifies optimality.
  for (const auto& rows : ties) {
    const Basis basis = build_basis(lp, rows);
    Eigen::PartialPivLU<MatrixXd> lu(basis.B);
    const VectorXd x = lu.solve(basis.rhs);
    const VectorXd y = basis.B.transpose().partialPivLu().solve(-lp.c);
    const VectorXd lambda_basis = y.head(static_cast<Eigen::Index>(rows.size()));
    if (lambda_basis.size() > 0 && lambda_basis.minCoeff() < -kDualTol) continue;

    result.status = OracleStatus::optimal;
    result.x_star = x;
    result.optimal_value = lp.c.dot(x);
    result.lambda_star = VectorXd::Zero(m);
    for (size_t r = 0; r < rows.size(); ++r) {
      result.lambda_star[rows[r]] = std::max(0.0, lambda_basis[static_cast<Eigen::Index>(r)]);
    }
    result.kappa_star = y.tail(l);
    result.active_set = rows;
    const VectorXd g = lp.A_ineq * x + lp.b_ineq;
    for (int i = 0; i < m; ++i) {
      if (std::abs(g[i]) <= kFeasTol * (1.0 + x.cwiseAbs().maxCoeff())) {
        result.tight_rows.push_back(i);
      }
    }
    return result;
  }

  const VectorXd ray = find_descent_ray(lp);
  if (ray.size() > 0 && (any_vertex || m == 0)) {
    result.status = OracleStatus::unbounded;
    result.ray = ray;
    return result;
  }
  if (!any_vertex) {
    Eigen::Index rows = m + l;
    MatrixXd all(rows, n);
    if (m > 0) all.topRows(m) = lp.A_ineq;
    if (l > 0) all.bottomRows(l) = lp.A_eq;
    if (rows > 0 && Eigen::FullPivLU<MatrixXd>(all).rank() == n) {
      result.status = OracleStatus::infeasible;
      return result;
    }
    if (ray.size() > 0) {
      // No vertices because of a lineality space; treat as unbounded.
      result.status = OracleStatus::unbounded;
      result.ray = ray;
      return result;
    }
    throw std::invalid_argument(
        "lp_oracle: constraint matrix lacks full column rank and no descent ray exists");
  }
  throw std::runtime_error("lp_oracle: no optimal basis and no descent ray found");
}

}  // namespace aula
