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

#include "aula/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aula {

namespace {

std::string shape_message(const char* block, Eigen::Index rows, Eigen::Index cols,
                          Eigen::Index want_rows, Eigen::Index want_cols) {
  std::ostringstream os;
  os << block << " has shape " << rows << "x" << cols << ", expected " << want_rows
     << "x" << want_cols;
  return os.str();
}

void require_shape(const char* block, const MatrixXd& mat, int rows, int cols) {
  if (mat.rows() != rows || mat.cols() != cols) {
    throw DimensionError(shape_message(block, mat.rows(), mat.cols(), rows, cols));
  }
}

void require_size(const char* block, const VectorXd& vec, int size) {
  if (vec.size() != size) {
    throw DimensionError(shape_message(block, vec.size(), 1, size, 1));
  }
}

bool all_finite(const ProblemEval& e) {
  if (!std::isfinite(e.f) || !e.grad_f.allFinite() || !e.hess_f.allFinite() ||
      !e.g.allFinite() || !e.jac_g.allFinite() || !e.h.allFinite() ||
      !e.jac_h.allFinite()) {
    return false;
  }
  for (const auto& H : e.hess_g) {
    if (!H.allFinite()) return false;
  }
  for (const auto& H : e.hess_h) {
    if (!H.allFinite()) return false;
  }
  return true;
}

double inf_norm(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double relative_error(const MatrixXd& analytic, const MatrixXd& numeric) {
  if (analytic.size() == 0) return 0.0;
  return inf_norm(analytic - numeric) / (1.0 + inf_norm(analytic));
}

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::lp:
      return "lp";
    case ProblemKind::qp:
      return "qp";
    case ProblemKind::custom:
      return "custom";
  }
  return "custom";
}

ConstrainedProblem::ConstrainedProblem(int dim_x, int dim_g, int dim_h, Evaluator evaluator,
                                       ProblemKind kind, bool constraints_affine)
    : n_(dim_x),
      m_(dim_g),
      l_(dim_h),
      evaluator_(std::move(evaluator)),
      kind_(kind),
      affine_(constraints_affine || kind == ProblemKind::lp || kind == ProblemKind::qp),
      counter_(std::make_unique<std::atomic<std::int64_t>>(0)) {
  if (n_ <= 0 || m_ < 0 || l_ < 0) {
    throw DimensionError("problem needs n > 0 and m, l >= 0");
  }
  if (!evaluator_) {
    throw std::invalid_argument("problem evaluator is empty");
  }
}

ProblemEval ConstrainedProblem::evaluate(const VectorXd& x, bool constraint_hessians) const {
  require_size("x", x, n_);
  counter_->fetch_add(1);

  ProblemEval out;
  out.x = x;
  out.constraint_hessians_requested = constraint_hessians;
  evaluator_(x, out);
  out.x = x;
  out.constraints_affine = affine_;

  require_size("grad_f", out.grad_f, n_);
  require_shape("hess_f", out.hess_f, n_, n_);
  require_size("g", out.g, m_);
  require_shape("jac_g", out.jac_g, m_, n_);
  require_size("h", out.h, l_);
  require_shape("jac_h", out.jac_h, l_, n_);
  if (!out.hess_g.empty() && out.hess_g.size() != static_cast<size_t>(m_)) {
    throw DimensionError("hess_g must hold one matrix per inequality");
  }
  if (!out.hess_h.empty() && out.hess_h.size() != static_cast<size_t>(l_)) {
    throw DimensionError("hess_h must hold one matrix per equality");
  }
  for (const auto& H : out.hess_g) require_shape("hess_g[i]", H, n_, n_);
  for (const auto& H : out.hess_h) require_shape("hess_h[j]", H, n_, n_);

  if (!all_finite(out)) {
    throw EvaluationError("non-finite problem evaluation");
  }
  const double asym = inf_norm(out.hess_f - out.hess_f.transpose());
  if (asym > 1e-12 * (1.0 + inf_norm(out.hess_f))) {
    throw EvaluationError("hess_f is not symmetric");
  }
  return out;
}

ConstrainedProblem ConstrainedProblem::from_program(QuadraticProgram data) {
  const int n = data.dim_x();
  if (n == 0) throw DimensionError("program has no variables");
  if (data.Q.size() == 0) data.Q = MatrixXd::Zero(n, n);
  if (data.A_ineq.size() == 0) data.A_ineq.resize(0, n);
  if (data.A_eq.size() == 0) data.A_eq.resize(0, n);
  if (data.b_ineq.size() == 0) data.b_ineq = VectorXd::Zero(data.A_ineq.rows());
  if (data.b_eq.size() == 0) data.b_eq = VectorXd::Zero(data.A_eq.rows());
  require_shape("Q", data.Q, n, n);
  require_shape("A_ineq", data.A_ineq, static_cast<int>(data.A_ineq.rows()), n);
  require_shape("A_eq", data.A_eq, static_cast<int>(data.A_eq.rows()), n);
  require_size("b_ineq", data.b_ineq, static_cast<int>(data.A_ineq.rows()));
  require_size("b_eq", data.b_eq, static_cast<int>(data.A_eq.rows()));
  if (!data.Q.isApprox(data.Q.transpose(), 1e-12) && !data.Q.isZero(0.0)) {
    throw std::invalid_argument("Q must be symmetric");
  }

  const int m = static_cast<int>(data.A_ineq.rows());
  const int l = static_cast<int>(data.A_eq.rows());
  const ProblemKind kind = data.is_linear() ? ProblemKind::lp : ProblemKind::qp;

  auto shared = std::make_shared<const QuadraticProgram>(data);
  Evaluator fn = [shared](const VectorXd& x, ProblemEval& out) {
    const QuadraticProgram& p = *shared;
    const VectorXd Qx = p.Q * x;
    out.f = 0.5 * x.dot(Qx) + p.c.dot(x) + p.c0;
    out.grad_f = Qx + p.c;
    out.hess_f = p.Q;
    out.g = p.A_ineq * x + p.b_ineq;
    out.jac_g = p.A_ineq;
    out.h = p.A_eq * x + p.b_eq;
    out.jac_h = p.A_eq;
  };
  ConstrainedProblem problem(n, m, l, std::move(fn), kind, true);
  problem.data_ = std::move(data);
  return problem;
}

double KktResiduals::max() const {
  return std::max({stationarity, primal_ineq, primal_eq, complementarity});
}

DualState::DualState(VectorXd lambda, VectorXd kappa, double mu, double nu)
    : lambda_(std::move(lambda)), kappa_(std::move(kappa)), mu_(mu), nu_(nu) {
  if (lambda_.size() > 0 && !(lambda_.minCoeff() >= 0.0)) {
    throw std::invalid_argument("inequality multipliers must be nonnegative");
  }
  if (!(mu_ > 0.0) || !(nu_ > 0.0)) {
    throw std::invalid_argument("penalty weights must be positive");
  }
}

DualState DualState::zeros(int dim_g, int dim_h, double mu, double nu) {
  return DualState(VectorXd::Zero(dim_g), VectorXd::Zero(dim_h), mu, nu);
}

DualState DualState::with_multipliers(VectorXd lambda, VectorXd kappa) const {
  return DualState(std::move(lambda), std::move(kappa), mu_, nu_);
}

DualState DualState::with_penalties(double mu, double nu) const {
  return DualState(lambda_, kappa_, mu, nu);
}

KktResiduals kkt_residuals(const ProblemEval& eval, const VectorXd& lambda,
                           const VectorXd& kappa) {
  if (lambda.size() != eval.g.size() || kappa.size() != eval.h.size()) {
    throw DimensionError("multiplier dimensions do not match the evaluation");
  }
  KktResiduals r;
  VectorXd stat = eval.grad_f;
  if (lambda.size() > 0) stat.noalias() += eval.jac_g.transpose() * lambda;
  if (kappa.size() > 0) stat.noalias() += eval.jac_h.transpose() * kappa;
  r.stationarity = stat.size() ? stat.cwiseAbs().maxCoeff() : 0.0;
  if (eval.g.size() > 0) {
    r.primal_ineq = std::max(0.0, eval.g.maxCoeff());
    r.complementarity = lambda.cwiseProduct(eval.g).cwiseAbs().maxCoeff();
  }
  if (eval.h.size() > 0) r.primal_eq = eval.h.cwiseAbs().maxCoeff();
  return r;
}

KktResiduals kkt_residuals(const ProblemEval& eval, const DualState& dual) {
  return kkt_residuals(eval, dual.lambda(), dual.kappa());
}

double constraint_violation(const ProblemEval& eval) {
  return eval.g.cwiseMax(0.0).sum() + eval.h.cwiseAbs().sum();
}

double GradientCheckReport::max_error() const {
  return std::max({grad_f, jac_g, jac_h, hess_f, hess_g, hess_h});
}

GradientCheckReport check_gradients_fd(const ConstrainedProblem& problem, const VectorXd& x,
                                       double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const int n = problem.dim_x();
  const int m = problem.dim_g();
  const int l = problem.dim_h();
  if (x.size() != n) throw DimensionError("point has wrong dimension");

  const ProblemEval center = problem.evaluate(x);
  const bool curvature = center.has_constraint_hessians() && (m + l) > 0;

  VectorXd fd_grad(n);
  MatrixXd fd_jac_g(m, n), fd_jac_h(l, n), fd_hess_f(n, n);
  std::vector<MatrixXd> fd_hess_g(curvature ? m : 0, MatrixXd(n, n));
  std::vector<MatrixXd> fd_hess_h(curvature ? l : 0, MatrixXd(n, n));

  for (int k = 0; k < n; ++k) {
    VectorXd xp = x, xm = x;
    xp[k] += eps;
    xm[k] -= eps;
    ProblemEval ep, em;
    try {
      ep = problem.evaluate(xp);
      em = problem.evaluate(xm);
    } catch (const EvaluationError& err) {
      throw EvaluationError(std::string("non-finite evaluation while perturbing coordinate ") +
                                std::to_string(k) + ": " + err.what(),
                            k);
    }
    const double inv = 1.0 / (2.0 * eps);
    fd_grad[k] = (ep.f - em.f) * inv;
    fd_jac_g.col(k) = (ep.g - em.g) * inv;
    fd_jac_h.col(k) = (ep.h - em.h) * inv;
    fd_hess_f.col(k) = (ep.grad_f - em.grad_f) * inv;
    for (int i = 0; i < static_cast<int>(fd_hess_g.size()); ++i) {
      fd_hess_g[i].col(k) = (ep.jac_g.row(i) - em.jac_g.row(i)).transpose() * inv;
    }
    for (int j = 0; j < static_cast<int>(fd_hess_h.size()); ++j) {
      fd_hess_h[j].col(k) = (ep.jac_h.row(j) - em.jac_h.row(j)).transpose() * inv;
    }
  }

  GradientCheckReport report;
  report.grad_f = relative_error(center.grad_f, fd_grad);
  report.jac_g = relative_error(center.jac_g, fd_jac_g);
  report.jac_h = relative_error(center.jac_h, fd_jac_h);
  report.hess_f = relative_error(center.hess_f, fd_hess_f);
  for (size_t i = 0; i < fd_hess_g.size(); ++i) {
    report.hess_g = std::max(report.hess_g, relative_error(center.hess_g[i], fd_hess_g[i]));
  }
  for (size_t j = 0; j < fd_hess_h.size(); ++j) {
    report.hess_h = std::max(report.hess_h, relative_error(center.hess_h[j], fd_hess_h[j]));
  }
  return report;
}

}  // namespace aula
