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

#include <cstdint>
#include <random>
#include <string>

namespace aula {

/// Reproducible N(0, 1) samples: mt19937_64 (fully specified by the
/// standard) feeding a Box-Muller transform on 53-bit uniforms. Unlike
/// std::normal_distribution the output is identical on every platform.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // in (0, 1)
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 finalizer, used to derive independent per-instance seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// How the first column (the offset) of G is pushed away from zero.
/// negate_abs: G_i0 <- -|G_i0| - 1, so g(0) <= -1 componentwise.
/// shift: G_i0 <- -G_i0 - 1 applied after the sign flip, which can make x = 0 infeasible.
enum class OffsetMode { negate_abs, shift };

std::string to_string(OffsetMode mode);
OffsetMode parse_offset_mode(const std::string& name);

struct RandomLpSpec {
  int n = 2;
  int m = 6;
  std::uint64_t seed = 0;
  OffsetMode offset_mode = OffsetMode::negate_abs;
};

/// G in R^{m x (n+1)}, rows drawn in row-major order.
MatrixXd random_lp_matrix(const RandomLpSpec& spec);

/// min sum_i x_i s.t. G (1; x) <= 0
QuadraticProgram random_lp_program(const RandomLpSpec& spec);
ConstrainedProblem gen_random_lp(const RandomLpSpec& spec);

/// Nonnegative least squares min ||M z - b|| s.t. z >= 0 (Lawson-Hanson).
VectorXd nonnegative_least_squares(const MatrixXd& M, const VectorXd& b, int max_iter = 0);

/// True when a feasible LP has a finite optimum, i.e. -c lies in the cone of
/// the inequality rows (plus the span of the equality rows), up to tol.
bool lp_is_bounded(const QuadraticProgram& lp, double tol = 1e-9);

}  // namespace aula
