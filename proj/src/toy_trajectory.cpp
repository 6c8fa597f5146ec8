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

#include "aula/toy_trajectory.hpp"

#include "aula/random_lp.hpp"

#include <memory>
#include <stdexcept>

namespace aula {

void ToyTrajectorySpec::validate() const {
  if (T < 3) throw std::invalid_argument("toy trajectory needs T >= 3");
  if (d < 1) throw std::invalid_argument("toy trajectory needs d >= 1");
  if (start.size() != d || goal.size() != d) {
    throw std::invalid_argument("start and goal must have d entries");
  }
  if (!(smoothness_weight > 0.0)) throw std::invalid_argument("smoothness weight must be positive");
  for (const auto& ob : obstacles) {
    if (ob.center.size() != d) throw std::invalid_argument("obstacle center must have d entries");
    if (!(ob.radius > 0.0)) throw std::invalid_argument("obstacle radius must be positive");
  }
}

ConstrainedProblem gen_toy_trajectory(const ToyTrajectorySpec& spec) {
  spec.validate();
  const int T = spec.T;
  const int d = spec.d;
  const int n = T * d;
  const int K = static_cast<int>(spec.obstacles.size());
  const int m = T * K;
  const int l = 2 * d;
  auto shared = std::make_shared<const ToyTrajectorySpec>(spec);

  // Hessian of sum_t |q_{t+1} - q_t|^2 is 2 (path Laplacian) kron I_d.
  MatrixXd hess = MatrixXd::Zero(n, n);
  for (int t = 0; t + 1 < T; ++t) {
    for (int k = 0; k < d; ++k) {
      const int a = t * d + k;
      const int b = (t + 1) * d + k;
      hess(a, a) += 2.0;
      hess(b, b) += 2.0;
      hess(a, b) -= 2.0;
      hess(b, a) -= 2.0;
    }
  }
  hess *= spec.smoothness_weight;

  Evaluator fn = [shared, hess, n, m, l](const VectorXd& x, ProblemEval& out) {
    const ToyTrajectorySpec& s = *shared;
    const int T = s.T;
    const int d = s.d;
    out.grad_f = hess * x;
    out.f = 0.5 * x.dot(out.grad_f);
    out.hess_f = hess;

    out.g.resize(m);
    out.jac_g = MatrixXd::Zero(m, n);
    const bool curvature = out.constraint_hessians_requested;
    if (curvature) out.hess_g.assign(static_cast<size_t>(m), MatrixXd::Zero(n, n));
    int row = 0;
    for (int t = 0; t < T; ++t) {
      const auto q = x.segment(t * d, d);
      for (const auto& ob : s.obstacles) {
        const VectorXd diff = q - ob.center;
        out.g[row] = ob.radius * ob.radius - diff.squaredNorm();
        out.jac_g.block(row, t * d, 1, d) = -2.0 * diff.transpose();
        if (curvature) {
          out.hess_g[static_cast<size_t>(row)].block(t * d, t * d, d, d) =
              -2.0 * MatrixXd::Identity(d, d);
        }
        ++row;
      }
    }

    out.h.resize(l);
    out.jac_h = MatrixXd::Zero(l, n);
    out.h.head(d) = x.head(d) - s.start;
    out.h.tail(d) = x.tail(d) - s.goal;
    out.jac_h.block(0, 0, d, d).setIdentity();
    out.jac_h.block(d, n - d, d, d).setIdentity();
    if (curvature) out.hess_h.assign(static_cast<size_t>(l), MatrixXd::Zero(n, n));
  };
  return ConstrainedProblem(n, m, l, std::move(fn), ProblemKind::custom, false);
}

VectorXd straight_line_trajectory(const ToyTrajectorySpec& spec) {
  spec.validate();
  VectorXd x(spec.T * spec.d);
  for (int t = 0; t < spec.T; ++t) {
    const double s = static_cast<double>(t) / (spec.T - 1);
    x.segment(t * spec.d, spec.d) = (1.0 - s) * spec.start + s * spec.goal;
  }
  return x;
}

ToyTrajectorySpec random_toy_trajectory(std::uint64_t seed, int T, int d, int obstacle_count,
                                        double smoothness_weight) {
  if (d < 2) throw std::invalid_argument("random toy trajectories need d >= 2");
  if (obstacle_count < 0) throw std::invalid_argument("obstacle count must be >= 0");
  GaussianSampler rng(seed);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };

  ToyTrajectorySpec spec;
  spec.T = T;
  spec.d = d;
  spec.smoothness_weight = smoothness_weight;
  spec.start = VectorXd::Zero(d);
  spec.goal = VectorXd::Zero(d);
  spec.goal[0] = 10.0;
  spec.start[1] = uniform(-1.0, 1.0);
  spec.goal[1] = uniform(-1.0, 1.0);

  const VectorXd dir = (spec.goal - spec.start).normalized();
  VectorXd normal = VectorXd::Zero(d);
  normal[0] = -dir[1];
  normal[1] = dir[0];
  for (int k = 0; k < obstacle_count; ++k) {
    CircleObstacle ob;
    ob.radius = uniform(0.8, 1.0);
    const double along = static_cast<double>(k + 1) / (obstacle_count + 1);
    // Sideways offset between 10% and 40% of the radius, random side.
    const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double offset = side * uniform(0.1, 0.4) * ob.radius;
    ob.center = (1.0 - along) * spec.start + along * spec.goal + offset * normal;
    spec.obstacles.push_back(ob);
  }
  spec.validate();
  return spec;
}

}  // namespace aula
