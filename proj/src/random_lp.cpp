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

#include "aula/random_lp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace aula {

double GaussianSampler::uniform() {
  for (;;) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double GaussianSampler::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string to_string(OffsetMode mode) {
  return mode == OffsetMode::negate_abs ? "negate_abs" : "shift";
}

OffsetMode parse_offset_mode(const std::string& name) {
  if (name == "negate_abs") return OffsetMode::negate_abs;
  if (name == "shift") return OffsetMode::shift;
  throw std::invalid_argument("unknown offset mode '" + name + "'");
}

MatrixXd random_lp_matrix(const RandomLpSpec& spec) {
  if (spec.n < 1 || spec.m < 1) throw std::invalid_argument("random LP needs n >= 1, m >= 1");
  GaussianSampler rng(spec.seed);
  MatrixXd G(spec.m, spec.n + 1);
  for (int i = 0; i < spec.m; ++i) {
    for (int j = 0; j <= spec.n; ++j) G(i, j) = rng.normal();
  }
  for (int i = 0; i < spec.m; ++i) {
    if (G(i, 0) > 0.0) G(i, 0) = -G(i, 0);
    G(i, 0) = spec.offset_mode == OffsetMode::negate_abs ? -std::abs(G(i, 0)) - 1.0
                                                         : -G(i, 0) - 1.0;
  }
  return G;
}

QuadraticProgram random_lp_program(const RandomLpSpec& spec) {
  const MatrixXd G = random_lp_matrix(spec);
  QuadraticProgram lp;
  lp.Q = MatrixXd::Zero(spec.n, spec.n);
  lp.c = VectorXd::Ones(spec.n);
  lp.A_ineq = G.rightCols(spec.n);
  lp.b_ineq = G.col(0);
  lp.A_eq.resize(0, spec.n);
  lp.b_eq.resize(0);
  return lp;
}

ConstrainedProblem gen_random_lp(const RandomLpSpec& spec) {
  return ConstrainedProblem::from_program(random_lp_program(spec));
}

VectorXd nonnegative_least_squares(const MatrixXd& M, const VectorXd& b, int max_iter) {
  const Eigen::Index k = M.cols();
  if (max_iter <= 0) max_iter = static_cast<int>(3 * k + 30);
  VectorXd z = VectorXd::Zero(k);
  std::vector<bool> passive(static_cast<size_t>(k), false);
  const double tol = 1e-12 * (1.0 + M.cwiseAbs().maxCoeff()) * (1.0 + b.cwiseAbs().maxCoeff());

  auto solve_passive = [&](VectorXd& s) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (passive[static_cast<size_t>(j)]) idx.push_back(j);
    }
    s = VectorXd::Zero(k);
    if (idx.empty()) return;
    MatrixXd sub(M.rows(), static_cast<Eigen::Index>(idx.size()));
    for (size_t c = 0; c < idx.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = M.col(idx[c]);
    const VectorXd sol = sub.colPivHouseholderQr().solve(b);
    for (size_t c = 0; c < idx.size(); ++c) s[idx[c]] = sol[static_cast<Eigen::Index>(c)];
  };

  for (int outer = 0; outer < max_iter; ++outer) {
    const VectorXd w = M.transpose() * (b - M * z);
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!passive[static_cast<size_t>(j)] && w[j] > best_w) {
        best_w = w[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<size_t>(best)] = true;

    for (int inner = 0; inner < max_iter; ++inner) {
      VectorXd s;
      solve_passive(s);
      bool feasible = true;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (passive[static_cast<size_t>(j)] && s[j] <= 0.0) feasible = false;
      }
      if (feasible) {
        z = s;
        break;
      }
      double step = 1.0;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (passive[static_cast<size_t>(j)] && s[j] <= 0.0) {
          step = std::min(step, z[j] / (z[j] - s[j]));
        }
      }
      z += step * (s - z);
      for (Eigen::Index j = 0; j < k; ++j) {
        if (passive[static_cast<size_t>(j)] && z[j] <= 1e-15) {
          passive[static_cast<size_t>(j)] = false;
          z[j] = 0.0;
        }
      }
    }
  }
  return z;
}

bool lp_is_bounded(const QuadraticProgram& lp, double tol) {
  const int n = lp.dim_x();
  const Eigen::Index m = lp.A_ineq.rows();
  const Eigen::Index l = lp.A_eq.rows();
  // Columns: inequality rows, then +/- equality rows (free multipliers).
  MatrixXd M(n, m + 2 * l);
  if (m > 0) M.leftCols(m) = lp.A_ineq.transpose();
  if (l > 0) {
    M.middleCols(m, l) = lp.A_eq.transpose();
    M.rightCols(l) = -lp.A_eq.transpose();
  }
  if (M.cols() == 0) return lp.c.isZero(tol);
  const VectorXd z = nonnegative_least_squares(M, -lp.c);
  return (M * z + lp.c).cwiseAbs().maxCoeff() <= tol * (1.0 + lp.c.cwiseAbs().maxCoeff());
}

}  // namespace aula
