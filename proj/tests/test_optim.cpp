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

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "opd/optim.hpp"

namespace opd::optim {
namespace {

TEST(Projection, Simplex) {
  std::vector<double> y = {0.5, 0.5, 0.5};
  project_simplex(y);
  for (double v : y) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
  y = {2.0, 0.0, -1.0};
  project_simplex(y);
  EXPECT_DOUBLE_EQ(y[0], 1.0);
  EXPECT_DOUBLE_EQ(y[1], 0.0);
  EXPECT_DOUBLE_EQ(y[2], 0.0);
}

TEST(Projection, CappedSimplexKeepsInteriorPoints) {
  std::vector<double> y = {0.2, 0.3};
  project_capped_simplex(y);
  EXPECT_DOUBLE_EQ(y[0], 0.2);
  EXPECT_DOUBLE_EQ(y[1], 0.3);
  y = {-0.5, 0.4};
  project_capped_simplex(y);
  EXPECT_DOUBLE_EQ(y[0], 0.0);
  EXPECT_DOUBLE_EQ(y[1], 0.4);
  y = {1.0, 1.0};
  project_capped_simplex(y);
  EXPECT_NEAR(y[0], 0.5, 1e-15);
  EXPECT_NEAR(y[1], 0.5, 1e-15);
}

// The projection p of v is characterised by <v - p, q - p> <= 0 for feasible q.
TEST(Projection, VariationalInequality) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 7;
    std::vector<double> v(n);
    for (auto& e : v) e = g(rng);
    std::vector<double> p = v;
    project_simplex(p);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    std::vector<double> q(n);
    for (int s = 0; s < 5; ++s) {
      for (auto& e : q) e = u(rng);
      project_simplex(q);
      double ip = 0.0;
      for (std::size_t i = 0; i < n; ++i) ip += (v[i] - p[i]) * (q[i] - p[i]);
      EXPECT_LE(ip, 1e-12);
    }
  }
}

TEST(Spg, MinimizesBoxedQuadratic) {
  // min (x0 - 1)^2 + (x1 + 2)^2 over x >= 0 has minimizer (1, 0).
  Objective f = [](std::span<const double> x, std::span<double> g) {
    g[0] = 2.0 * (x[0] - 1.0);
    g[1] = 2.0 * (x[1] + 2.0);
    return (x[0] - 1.0) * (x[0] - 1.0) + (x[1] + 2.0) * (x[1] + 2.0);
  };
  SpgSettings s;
  s.tol = 1e-12;
  const SpgResult r = spg_minimize(f, {3.0, 3.0}, clamp_nonnegative, s);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-10);
  EXPECT_EQ(r.x[1], 0.0);
  EXPECT_NEAR(r.value, 4.0, 1e-12);
}

TEST(Spg, ReportsDivergence) {
  Objective f = [](std::span<const double> x, std::span<double> g) {
    g[0] = -1.0;
    return -x[0];
  };
  SpgSettings s;
  s.divergence = 1e8;
  const SpgResult r = spg_minimize(f, {1.0}, clamp_nonnegative, s);
  EXPECT_TRUE(r.diverged);
}

TEST(ProjectedGradient, ZeroAtConstrainedOptimum) {
  std::vector<double> x = {0.0}, g = {1.0};
  EXPECT_EQ(projected_gradient_norm(x, g, clamp_nonnegative), 0.0);
  g = {-1.0};
  EXPECT_EQ(projected_gradient_norm(x, g, clamp_nonnegative), 1.0);
}

}  // namespace
}  // namespace opd::optim
