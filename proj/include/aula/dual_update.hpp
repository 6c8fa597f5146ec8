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

#include "aula/lagrangian.hpp"

#include <vector>

namespace aula {

struct DualUpdateResult {
  VectorXd lambda_new;
  VectorXd kappa_new;
  /// Inequality rows that entered the least-squares system.
  std::vector<bool> active_rows;
  /// Entries whose unconstrained value was negative and got truncated to 0.
  std::vector<bool> clipped;
  /// Any-time objective at the unclipped solution; 0 for centered updates.
  double residual = 0.0;
  /// The any-time system was singular and the centered update was used instead.
  bool fell_back_to_centered = false;

  int clipped_count() const;
};

/// lambda' = max(0, lambda + 2 mu g), kappa' = kappa + 2 nu h.
DualUpdateResult centered_update(const VectorXd& g, const VectorXd& h, const DualState& dual);

/// Which inequality rows form the any-time system. mask: the activity mask of
/// the current state (default). positive_multipliers: only rows with lambda_i > 0.
enum class RowSelection { mask, positive_multipliers };

/**
 * Approximate any-time update: with A the selected rows of Jg stacked over
 * Jh and y the matching entries of (lambda + 2 mu g; kappa + 2 nu h),
 * solves (lambda'; kappa')_A = y - (A A' + sigma I)^-1 A grad L, zeroes the
 * unselected inequality multipliers and clips negative ones to zero.
 * sigma = 1e-10 trace(A A') / rows.
 */
DualUpdateResult anytime_update(const LagrangianEval& leval, const DualState& dual,
                                RowSelection selection = RowSelection::mask);

/// || [(l; k) - (lambda + 2 mu I g; kappa + 2 nu h)]' (Jg; Jh) + grad L ||^2
/// for a candidate (l, k). Requires l >= 0.
double anytime_residual(const LagrangianEval& leval, const DualState& dual,
                        const VectorXd& lambda_candidate, const VectorXd& kappa_candidate);

}  // namespace aula
