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
#include <vector>

namespace aula {

struct CircleObstacle {
  VectorXd center;
  double radius = 1.0;
};

/// A point robot moving through T configurations in R^d.
struct ToyTrajectorySpec {
  int T = 40;
  int d = 2;
  VectorXd start;
  VectorXd goal;
  std::vector<CircleObstacle> obstacles;
  double smoothness_weight = 1.0;

  void validate() const;
};

/**
 * x stacks q_1..q_T. f = w sum_t |q_{t+1} - q_t|^2, equalities q_1 = start
 * and q_T = goal, and one keep-out inequality r^2 - |q_t - c|^2 <= 0 per
 * (time slice, obstacle), ordered slice-major. Constraint Hessians are
 * supplied.
 */
ConstrainedProblem gen_toy_trajectory(const ToyTrajectorySpec& spec);

/// Linear interpolation from start to goal.
VectorXd straight_line_trajectory(const ToyTrajectorySpec& spec);

/// Start near (0, 0), goal near (10, 0), obstacles spaced along the segment
/// and offset sideways by less than their radius, so the straight line
/// passes through every obstacle.
ToyTrajectorySpec random_toy_trajectory(std::uint64_t seed, int T, int d, int obstacle_count,
                                        double smoothness_weight = 1.0);

}  // namespace aula
