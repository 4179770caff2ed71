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

#include "opd/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>

namespace opd::optim {
namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

constexpr double kAlphaMin = 1e-30;
constexpr double kAlphaMax = 1e30;
constexpr double kArmijo = 1e-4;

}  // namespace

void clamp_nonnegative(std::span<double> x) {
  for (double& v : x) v = std::max(v, 0.0);
}

void project_capped_simplex(std::span<double> y) {
  double sum = 0.0;
  for (double v : y) sum += std::max(v, 0.0);
  if (sum <= 1.0) {
    clamp_nonnegative(y);
    return;
  }
  project_simplex(y);
}

void project_simplex(std::span<double> y) {
  if (y.empty()) return;
  // The projection commutes with adding a constant; shifting by the maximum
  // keeps the threshold accurate for very large inputs.
  const double top = *std::max_element(y.begin(), y.end());
  for (double& v : y) v -= top;
  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    running += sorted[k];
    double cand = (running - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - cand > 0.0) theta = cand;
  }
  for (double& v : y) v = std::max(v - theta, 0.0);
}

double projected_gradient_norm(std::span<const double> x, std::span<const double> g,
                               const Projection& project) {
  std::vector<double> p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) p[i] = x[i] - g[i];
  project(p);
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(p[i] - x[i]));
  return m;
}

SpgResult spg_minimize(const Objective& objective, std::vector<double> x0,
                       const Projection& project, const SpgSettings& settings) {
  const std::size_t n = x0.size();
  SpgResult res;
  res.x = std::move(x0);
  project(res.x);
  std::vector<double> g(n), gn(n), d(n), xn(n);
  double f = objective(res.x, g);
  std::deque<double> history{f};
  res.pg_norm = projected_gradient_norm(res.x, g, project);
  if (res.pg_norm <= settings.tol) {
    res.value = f;
    res.converged = true;
    return res;
  }
  double alpha = std::clamp(1.0 / res.pg_norm, kAlphaMin, kAlphaMax);
  for (res.iterations = 1; res.iterations <= settings.max_iter; ++res.iterations) {
    for (std::size_t i = 0; i < n; ++i) d[i] = res.x[i] - alpha * g[i];
    project(d);
    for (std::size_t i = 0; i < n; ++i) d[i] -= res.x[i];
    double gd = dot(g, d);
    if (!(gd < 0.0)) break;
    double fmax = *std::max_element(history.begin(), history.end());
    double noise = 1e-15 * (1.0 + std::abs(f));
    double lambda = 1.0;
    double fn = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = res.x[i] + lambda * d[i];
      fn = objective(xn, gn);
      if (std::isfinite(fn) && fn <= fmax + kArmijo * lambda * gd + noise) {
        accepted = true;
        break;
      }
      double denom = fn - f - lambda * gd;
      double trial = std::isfinite(fn) && denom > 0.0 ? -0.5 * lambda * lambda * gd / denom : 0.0;
      lambda = (trial >= 0.1 * lambda && trial <= 0.9 * lambda) ? trial : 0.5 * lambda;
    }
    if (!accepted) break;
    double ss = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = xn[i] - res.x[i];
      ss += s * s;
      sy += s * (gn[i] - g[i]);
    }
    alpha = sy > 0.0 ? std::clamp(ss / sy, kAlphaMin, kAlphaMax) : kAlphaMax;
    res.x.swap(xn);
    g.swap(gn);
    f = fn;
    history.push_back(f);
    if (static_cast<int>(history.size()) > settings.memory) history.pop_front();
    if (inf_norm(res.x) > settings.divergence) {
      res.diverged = true;
      break;
    }
    res.pg_norm = projected_gradient_norm(res.x, g, project);
    if (res.pg_norm <= settings.tol) {
      res.converged = true;
      break;
    }
  }
  res.iterations = std::min(res.iterations, settings.max_iter);
  res.value = f;
  return res;
}

}  // namespace opd::optim
