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

#include "aula/lagrangian.hpp"

#include <algorithm>
#include <cmath>

namespace aula {

namespace {

void check_dims(const ProblemEval& eval, const DualState& dual) {
  if (dual.lambda().size() != eval.g.size() || dual.kappa().size() != eval.h.size()) {
    throw DimensionError("dual state does not match the problem's constraint counts");
  }
}

// Multiplier seen by each inequality gradient: 2 mu I g + lambda.
VectorXd inequality_weights(const ProblemEval& eval, const DualState& dual,
                            const ActivityMask& mask) {
  return 2.0 * dual.mu() * mask.as_vector().cwiseProduct(eval.g) + dual.lambda();
}

VectorXd equality_weights(const ProblemEval& eval, const DualState& dual) {
  return 2.0 * dual.nu() * eval.h + dual.kappa();
}

}  // namespace

int ActivityMask::count() const {
  return static_cast<int>(std::count(active.begin(), active.end(), true));
}

VectorXd ActivityMask::as_vector() const {
  VectorXd v(size());
  for (int i = 0; i < size(); ++i) v[i] = active[static_cast<size_t>(i)] ? 1.0 : 0.0;
  return v;
}

ActivityMask activity_indicator(const VectorXd& g, const VectorXd& lambda, ActivityRule rule) {
  if (g.size() != lambda.size()) {
    throw DimensionError("activity_indicator: g and lambda differ in length");
  }
  ActivityMask mask;
  mask.active.resize(static_cast<size_t>(g.size()));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const bool violated = rule == ActivityRule::inclusive ? g[i] >= 0.0 : g[i] > 0.0;
    mask.active[static_cast<size_t>(i)] = violated || lambda[i] > 0.0;
  }
  return mask;
}

double lagrangian_value(const ProblemEval& eval, const DualState& dual, ActivityRule rule) {
  check_dims(eval, dual);
  const ActivityMask mask = activity_indicator(eval.g, dual.lambda(), rule);
  double value = eval.f;
  for (int i = 0; i < mask.size(); ++i) {
    const double gi = eval.g[i];
    if (mask[i]) value += dual.mu() * gi * gi;
    value += dual.lambda()[i] * gi;
  }
  value += dual.nu() * eval.h.squaredNorm() + dual.kappa().dot(eval.h);
  if (!std::isfinite(value)) throw EvaluationError("non-finite Lagrangian value");
  return value;
}

VectorXd lagrangian_gradient(const ProblemEval& eval, const DualState& dual, ActivityRule rule) {
  check_dims(eval, dual);
  const ActivityMask mask = activity_indicator(eval.g, dual.lambda(), rule);
  VectorXd grad = eval.grad_f;
  if (eval.g.size() > 0) {
    grad.noalias() += eval.jac_g.transpose() * inequality_weights(eval, dual, mask);
  }
  if (eval.h.size() > 0) {
    grad.noalias() += eval.jac_h.transpose() * equality_weights(eval, dual);
  }
  return grad;
}

MatrixXd lagrangian_hessian(const ProblemEval& eval, const DualState& dual, HessianMode mode,
                            ActivityRule rule) {
  check_dims(eval, dual);
  const bool need_curvature = mode == HessianMode::full && !eval.constraints_affine;
  if (need_curvature && !eval.has_constraint_hessians() && eval.g.size() + eval.h.size() > 0) {
    throw ConfigurationError(
        "full Hessian mode needs constraint Hessians for non-affine constraints");
  }
  const ActivityMask mask = activity_indicator(eval.g, dual.lambda(), rule);
  MatrixXd hess = eval.hess_f;
  for (int i = 0; i < mask.size(); ++i) {
    if (mask[i]) {
      hess.noalias() += 2.0 * dual.mu() * eval.jac_g.row(i).transpose() * eval.jac_g.row(i);
    }
  }
  if (eval.h.size() > 0) {
    hess.noalias() += 2.0 * dual.nu() * eval.jac_h.transpose() * eval.jac_h;
  }
  if (need_curvature) {
    const VectorXd wg = inequality_weights(eval, dual, mask);
    const VectorXd wh = equality_weights(eval, dual);
    for (Eigen::Index i = 0; i < wg.size(); ++i) hess += wg[i] * eval.hess_g[i];
    for (Eigen::Index j = 0; j < wh.size(); ++j) hess += wh[j] * eval.hess_h[j];
  }
  return hess;
}

LagrangianEval evaluate_lagrangian(ProblemEval eval, const DualState& dual, HessianMode mode,
                                   ActivityRule rule) {
  LagrangianEval out;
  out.value = lagrangian_value(eval, dual, rule);
  out.gradient = lagrangian_gradient(eval, dual, rule);
  out.hessian = lagrangian_hessian(eval, dual, mode, rule);
  out.mask = activity_indicator(eval.g, dual.lambda(), rule);
  out.source = std::move(eval);
  return out;
}

AugmentedLagrangian::AugmentedLagrangian(const ConstrainedProblem& problem, DualState dual,
                                         HessianMode mode, ActivityRule rule)
    : problem_(&problem), dual_(std::move(dual)), mode_(mode), rule_(rule) {
  if (dual_.lambda().size() != problem.dim_g() || dual_.kappa().size() != problem.dim_h()) {
    throw DimensionError("dual state does not match the problem's constraint counts");
  }
}

double AugmentedLagrangian::value(const ProblemEval& eval) const {
  return lagrangian_value(eval, dual_, rule_);
}

LagrangianEval AugmentedLagrangian::complete(ProblemEval eval) const {
  return evaluate_lagrangian(std::move(eval), dual_, mode_, rule_);
}

void AugmentedLagrangian::set_dual(DualState dual) {
  if (dual.lambda().size() != dual_.lambda().size() ||
      dual.kappa().size() != dual_.kappa().size()) {
    throw DimensionError("dual state does not match the problem's constraint counts");
  }
  dual_ = std::move(dual);
}

}  // namespace aula
