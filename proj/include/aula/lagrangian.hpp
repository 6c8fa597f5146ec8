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

#include <stdexcept>
#include <vector>

namespace aula {

/// Requested computation is not possible with the data a problem provides.
class ConfigurationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// How g_i = 0 is classified. inclusive: active iff g_i >= 0 or lambda_i > 0.
/// strict (g_i > 0) exists for comparison tests only.
enum class ActivityRule { inclusive, strict };

struct ActivityMask {
  std::vector<bool> active;

  int size() const { return static_cast<int>(active.size()); }
  int count() const;
  bool operator[](int i) const { return active[static_cast<size_t>(i)]; }
  /// 1.0 for active rows, 0.0 otherwise.
  VectorXd as_vector() const;
};

ActivityMask activity_indicator(const VectorXd& g, const VectorXd& lambda,
                                ActivityRule rule = ActivityRule::inclusive);

enum class HessianMode { gauss_newton, full };

/// Value, gradient and Hessian of a merit function, all derived from one
/// ProblemEval so the three stay mutually consistent.
struct LagrangianEval {
  double value = 0.0;
  VectorXd gradient;
  MatrixXd hessian;
  ActivityMask mask;
  ProblemEval source;

  const VectorXd& x() const { return source.x; }
};

/// f + sum_i (mu [active_i] g_i + lambda_i) g_i + sum_j (nu h_j + kappa_j) h_j
double lagrangian_value(const ProblemEval& eval, const DualState& dual,
                        ActivityRule rule = ActivityRule::inclusive);

/// grad f + (2 mu I g + lambda)' Jg + (2 nu h + kappa)' Jh
VectorXd lagrangian_gradient(const ProblemEval& eval, const DualState& dual,
                             ActivityRule rule = ActivityRule::inclusive);

/// Gauss-Newton drops the constraint curvature terms. Full mode needs
/// constraint Hessians unless the problem declares affine constraints, and
/// throws ConfigurationError otherwise.
MatrixXd lagrangian_hessian(const ProblemEval& eval, const DualState& dual,
                            HessianMode mode = HessianMode::gauss_newton,
                            ActivityRule rule = ActivityRule::inclusive);

LagrangianEval evaluate_lagrangian(ProblemEval eval, const DualState& dual,
                                   HessianMode mode = HessianMode::gauss_newton,
                                   ActivityRule rule = ActivityRule::inclusive);

/**
 * Unconstrained objective minimized by the Newton driver. A trial costs one
 * problem evaluation plus value(); gradient and Hessian are only formed by
 * complete() once a trial is accepted, from the same ProblemEval.
 */
class MeritFunction {
 public:
  virtual ~MeritFunction() = default;

  virtual const ConstrainedProblem& problem() const = 0;
  /// +infinity marks points outside the merit's domain.
  virtual double value(const ProblemEval& eval) const = 0;
  virtual LagrangianEval complete(ProblemEval eval) const = 0;
  /// Whether complete() reads hess_g and hess_h.
  virtual bool needs_constraint_hessians() const { return true; }

  LagrangianEval evaluate(const VectorXd& x) const {
    return complete(problem().evaluate(x, needs_constraint_hessians()));
  }
};

/// The augmented Lagrangian L(., lambda, kappa) for a fixed dual state.
class AugmentedLagrangian final : public MeritFunction {
 public:
  AugmentedLagrangian(const ConstrainedProblem& problem, DualState dual,
                      HessianMode mode = HessianMode::gauss_newton,
                      ActivityRule rule = ActivityRule::inclusive);

  const ConstrainedProblem& problem() const override { return *problem_; }
  double value(const ProblemEval& eval) const override;
  LagrangianEval complete(ProblemEval eval) const override;
  bool needs_constraint_hessians() const override {
    return mode_ == HessianMode::full && !problem_->constraints_affine();
  }

  const DualState& dual() const { return dual_; }
  void set_dual(DualState dual);

 private:
  const ConstrainedProblem* problem_;
  DualState dual_;
  HessianMode mode_;
  ActivityRule rule_;
};

}  // namespace aula
