/*
 * Copyright 2026 The opd Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Spectral projected gradient (Barzilai-Borwein steps with a nonmonotone
// Armijo backtracking line search) over a closed convex set given by its
// Euclidean projection.

#ifndef OPD_OPTIM_HPP_
#define OPD_OPTIM_HPP_

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace opd::optim {

// Returns f(x) and writes grad f(x).
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;
using Projection = std::function<void(std::span<double> x)>;

struct SpgSettings {
  int max_iter = 10000;
  // Stop when ||P(x - grad) - x||_inf <= tol.
  double tol = 1e-10;
  // Declare divergence when ||x||_inf exceeds this bound.
  double divergence = std::numeric_limits<double>::infinity();
  int memory = 10;
};

struct SpgResult {
  std::vector<double> x;
  double value = 0.0;
  double pg_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool diverged = false;
};

SpgResult spg_minimize(const Objective& objective, std::vector<double> x0,
                       const Projection& project, const SpgSettings& settings);

void clamp_nonnegative(std::span<double> x);

// Euclidean projection onto {y >= 0, sum(y) <= 1}.
void project_capped_simplex(std::span<double> y);

// Euclidean projection onto {y >= 0, sum(y) = 1}.
void project_simplex(std::span<double> y);

// ||P(x - g) - x||_inf for the given projection.
double projected_gradient_norm(std::span<const double> x, std::span<const double> g,
                               const Projection& project);

}  // namespace opd::optim

#endif  // OPD_OPTIM_HPP_
