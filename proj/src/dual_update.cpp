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

#include "aula/dual_update.hpp"

#include <algorithm>
#include <cmath>

namespace aula {

namespace {

// Unsigned version of anytime_residual, also used for unclipped candidates.
double residual_unchecked(const LagrangianEval& leval, const DualState& dual,
                          const VectorXd& lambda_c, const VectorXd& kappa_c) {
  const ProblemEval& e = leval.source;
  const VectorXd y_g =
      dual.lambda() + 2.0 * dual.mu() * leval.mask.as_vector().cwiseProduct(e.g);
  const VectorXd y_h = dual.kappa() + 2.0 * dual.nu() * e.h;
  VectorXd r = leval.gradient;
  if (e.g.size() > 0) r.noalias() += e.jac_g.transpose() * (lambda_c - y_g);
  if (e.h.size() > 0) r.noalias() += e.jac_h.transpose() * (kappa_c - y_h);
  return r.squaredNorm();
}

}  // namespace

int DualUpdateResult::clipped_count() const {
  return static_cast<int>(std::count(clipped.begin(), clipped.end(), true));
}

DualUpdateResult centered_update(const VectorXd& g, const VectorXd& h, const DualState& dual) {
  if (g.size() != dual.lambda().size() || h.size() != dual.kappa().size()) {
    throw DimensionError("centered_update: constraint values do not match the dual state");
  }
  DualUpdateResult out;
  const VectorXd raw = dual.lambda() + 2.0 * dual.mu() * g;
  out.lambda_new = raw.cwiseMax(0.0);
  out.kappa_new = dual.kappa() + 2.0 * dual.nu() * h;
  out.active_rows.assign(static_cast<size_t>(g.size()), true);
  out.clipped.resize(static_cast<size_t>(g.size()));
  for (Eigen::Index i = 0; i < g.size(); ++i) out.clipped[static_cast<size_t>(i)] = raw[i] < 0.0;
  return out;
}

DualUpdateResult anytime_update(const LagrangianEval& leval, const DualState& dual,
                                RowSelection selection) {
  const ProblemEval& e = leval.source;
  const int m = e.dim_g();
  const int l = e.dim_h();
  const int n = e.dim_x();
  if (dual.lambda().size() != m || dual.kappa().size() != l || leval.mask.size() != m) {
    throw DimensionError("anytime_update: dual state does not match the evaluation");
  }

  std::vector<int> rows;
  for (int i = 0; i < m; ++i) {
    const bool take = selection == RowSelection::mask ? leval.mask[i] : dual.lambda()[i] > 0.0;
    if (take) rows.push_back(i);
  }
  const int k = static_cast<int>(rows.size());
  const int total = k + l;

  DualUpdateResult out;
  out.lambda_new = VectorXd::Zero(m);
  out.kappa_new = VectorXd::Zero(l);
  out.active_rows.assign(static_cast<size_t>(m), false);
  out.clipped.assign(static_cast<size_t>(m), false);
  for (int i : rows) out.active_rows[static_cast<size_t>(i)] = true;

  VectorXd unclipped = VectorXd::Zero(m);
  if (total > 0) {
    MatrixXd A(total, n);
    VectorXd y(total);
    for (int r = 0; r < k; ++r) {
      const int i = rows[static_cast<size_t>(r)];
      A.row(r) = e.jac_g.row(i);
      y[r] = dual.lambda()[i] + 2.0 * dual.mu() * e.g[i];
    }
    for (int j = 0; j < l; ++j) {
      A.row(k + j) = e.jac_h.row(j);
      y[k + j] = dual.kappa()[j] + 2.0 * dual.nu() * e.h[j];
    }
    MatrixXd gram = A * A.transpose();
    const double sigma = 1e-10 * gram.trace() / total;
    gram.diagonal().array() += sigma;
    Eigen::LLT<MatrixXd> llt(gram);
    VectorXd z;
    bool ok = sigma > 0.0 && llt.info() == Eigen::Success;
    if (ok) {
      z = y - llt.solve(A * leval.gradient);
      ok = z.allFinite();
    }
    if (!ok) {
      DualUpdateResult fallback = centered_update(e.g, e.h, dual);
      fallback.fell_back_to_centered = true;
      return fallback;
    }
    for (int r = 0; r < k; ++r) unclipped[rows[static_cast<size_t>(r)]] = z[r];
    out.kappa_new = z.tail(l);
  }

  out.residual = residual_unchecked(leval, dual, unclipped, out.kappa_new);
  for (int i = 0; i < m; ++i) {
    if (unclipped[i] < 0.0) {
      out.clipped[static_cast<size_t>(i)] = true;
      out.lambda_new[i] = 0.0;
    } else {
      out.lambda_new[i] = unclipped[i];
    }
  }
  return out;
}

double anytime_residual(const LagrangianEval& leval, const DualState& dual,
                        const VectorXd& lambda_candidate, const VectorXd& kappa_candidate) {
  if (lambda_candidate.size() != dual.lambda().size() ||
      kappa_candidate.size() != dual.kappa().size()) {
    throw DimensionError("anytime_residual: candidate has wrong dimensions");
  }
  if (lambda_candidate.size() > 0 && lambda_candidate.minCoeff() < 0.0) {
    throw std::invalid_argument("anytime_residual: candidate lambda must be nonnegative");
  }
  return residual_unchecked(leval, dual, lambda_candidate, kappa_candidate);
}

}  // namespace aula
