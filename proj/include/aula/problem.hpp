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

#include <Eigen/Dense>

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aula {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Thrown when vector or matrix sizes disagree with the declared problem shape.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an evaluator produces NaN or infinite values.
class EvaluationError : public std::runtime_error {
 public:
  explicit EvaluationError(const std::string& what, int index = -1)
      : std::runtime_error(what), index_(index) {}
  /// Offending coordinate, or -1 when not attributable to one.
  int index() const { return index_; }

 private:
  int index_;
};

enum class ProblemKind { lp, qp, custom };

std::string to_string(ProblemKind kind);

/**
 * One evaluation of objective, constraints and their derivatives at x.
 *
 * Inequalities are g(x) <= 0 and equalities h(x) = 0. Jacobians are stored
 * row-per-constraint (m x n and l x n). Constraint Hessians are optional:
 * they are left empty when the problem declares affine constraints.
 */
struct ProblemEval {
  VectorXd x;
  double f = 0.0;
  VectorXd grad_f;
  MatrixXd hess_f;
  VectorXd g;
  MatrixXd jac_g;
  VectorXd h;
  MatrixXd jac_h;
  std::vector<MatrixXd> hess_g;
  std::vector<MatrixXd> hess_h;
  bool constraints_affine = false;
  /// Set before the evaluator runs. When false the evaluator may leave
  /// hess_g and hess_h empty.
  bool constraint_hessians_requested = true;

  int dim_x() const { return static_cast<int>(x.size()); }
  int dim_g() const { return static_cast<int>(g.size()); }
  int dim_h() const { return static_cast<int>(h.size()); }
  bool has_constraint_hessians() const {
    return hess_g.size() == static_cast<size_t>(g.size()) &&
           hess_h.size() == static_cast<size_t>(h.size());
  }
};

/// Dense data of min 1/2 x'Qx + c'x + c0 s.t. A_ineq x + b_ineq <= 0, A_eq x + b_eq = 0.
/// An empty (or all-zero) Q makes it a linear program.
struct QuadraticProgram {
  MatrixXd Q;
  VectorXd c;
  double c0 = 0.0;
  MatrixXd A_ineq;
  VectorXd b_ineq;
  MatrixXd A_eq;
  VectorXd b_eq;

  int dim_x() const { return static_cast<int>(c.size()); }
  bool is_linear() const { return Q.size() == 0 || Q.isZero(0.0); }
};

/// Callback that fills every field of ProblemEval except x.
using Evaluator = std::function<void(const VectorXd& x, ProblemEval& out)>;

/**
 * min f(x) s.t. g(x) <= 0, h(x) = 0 with n variables, m inequalities and l
 * equalities. Immutable after construction apart from the evaluation
 * counter, which is atomic so concurrent solves may share one problem.
 */
class ConstrainedProblem {
 public:
  ConstrainedProblem(int dim_x, int dim_g, int dim_h, Evaluator evaluator,
                     ProblemKind kind = ProblemKind::custom,
                     bool constraints_affine = false);

  ConstrainedProblem(ConstrainedProblem&&) noexcept = default;
  ConstrainedProblem& operator=(ConstrainedProblem&&) noexcept = default;

  int dim_x() const { return n_; }
  int dim_g() const { return m_; }
  int dim_h() const { return l_; }
  ProblemKind kind() const { return kind_; }
  bool constraints_affine() const { return affine_; }

  /// Evaluates everything at x and bumps the evaluation counter by one.
  /// Throws DimensionError on size mismatch, EvaluationError on non-finite output.
  ProblemEval evaluate(const VectorXd& x, bool constraint_hessians = true) const;

  std::int64_t evaluation_count() const { return counter_->load(); }

  /// Present for problems built from QuadraticProgram data.
  const std::optional<QuadraticProgram>& program_data() const { return data_; }

  static ConstrainedProblem from_program(QuadraticProgram data);

 private:
  int n_;
  int m_;
  int l_;
  Evaluator evaluator_;
  ProblemKind kind_;
  bool affine_;
  std::optional<QuadraticProgram> data_;
  std::unique_ptr<std::atomic<std::int64_t>> counter_;
};

/// Residuals of the four KKT conditions, all in the infinity norm.
struct KktResiduals {
  double stationarity = 0.0;
  double primal_ineq = 0.0;
  double primal_eq = 0.0;
  double complementarity = 0.0;

  double max() const;
  bool satisfied(double tol) const { return max() <= tol; }
};

/**
 * Multipliers (lambda >= 0 for inequalities, kappa for equalities) and the
 * penalty weights mu, nu. Nonnegativity of lambda is checked on
 * construction, so any DualState in circulation is dual feasible.
 */
class DualState {
 public:
  DualState(VectorXd lambda, VectorXd kappa, double mu = 1.0, double nu = 1.0);

  static DualState zeros(int dim_g, int dim_h, double mu = 1.0, double nu = 1.0);

  const VectorXd& lambda() const { return lambda_; }
  const VectorXd& kappa() const { return kappa_; }
  double mu() const { return mu_; }
  double nu() const { return nu_; }

  DualState with_multipliers(VectorXd lambda, VectorXd kappa) const;
  DualState with_penalties(double mu, double nu) const;

 private:
  VectorXd lambda_;
  VectorXd kappa_;
  double mu_;
  double nu_;
};

KktResiduals kkt_residuals(const ProblemEval& eval, const DualState& dual);

/// Same as above with raw multiplier vectors (no sign requirement on lambda).
KktResiduals kkt_residuals(const ProblemEval& eval, const VectorXd& lambda,
                           const VectorXd& kappa);

/// sum_i max(0, g_i) + sum_j |h_j|
double constraint_violation(const ProblemEval& eval);

struct GradientCheckReport {
  double grad_f = 0.0;
  double jac_g = 0.0;
  double jac_h = 0.0;
  double hess_f = 0.0;
  /// Max over constraints; zero when the problem carries no constraint Hessians.
  double hess_g = 0.0;
  double hess_h = 0.0;

  double max_error() const;
};

/**
 * Compares analytic derivatives against central differences with step eps.
 * Errors are ||analytic - fd||_inf / (1 + ||analytic||_inf) per block.
 * Hessians are checked against differences of the analytic gradients.
 */
GradientCheckReport check_gradients_fd(const ConstrainedProblem& problem,
                                       const VectorXd& x, double eps = 1e-6);

}  // namespace aula
