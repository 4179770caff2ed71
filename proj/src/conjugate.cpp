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

#include "opd/conjugate.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "opd/error.hpp"
#include "opd/optim.hpp"

namespace opd {

ConjugateOracle::ConjugateOracle(const CostFunction& base, ConjugateSettings settings)
    : base_(base), settings_(settings) {
  const std::size_t n = base_.dim();
  starts_.emplace_back(n, 0.0);
  starts_.emplace_back(n, 1.0);
  std::mt19937_64 rng(settings_.seed);
  std::uniform_real_distribution<double> coord(0.0, 2.0);
  for (int s = 0; s < settings_.random_starts; ++s) {
    std::vector<double> p(n);
    for (double& v : p) v = coord(rng);
    starts_.push_back(std::move(p));
  }
}

ConjugateValue ConjugateOracle::operator()(std::span<const double> z) const {
  const std::size_t n = base_.dim();
  if (z.size() != n) throw DimensionMismatch("conjugate point has wrong dimension");
  ConjugateValue out;
  out.maximizer.assign(n, 0.0);
  double znorm = 0.0;
  bool zero = true;
  for (double v : z) {
    if (v < 0.0) throw Error("conjugate evaluated at a negative point");
    znorm += v * v;
    zero = zero && v == 0.0;
  }
  if (zero) return out;
  znorm = std::sqrt(znorm);

  optim::SpgSettings spg;
  spg.max_iter = settings_.max_iter;
  spg.tol = settings_.tol * (1.0 + znorm);
  spg.divergence = settings_.divergence;
  // Minimize f(x) - <x, z>.
  auto objective = [&](std::span<const double> x, std::span<double> g) {
    base_.gradient(x, g);
    double lin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lin += x[i] * z[i];
      g[i] -= z[i];
    }
    return base_.value(x) - lin;
  };
  bool have = false;
  for (const auto& start : starts_) {
    optim::SpgResult r = optim::spg_minimize(objective, start, optim::clamp_nonnegative, spg);
    if (r.diverged) {
      out.infinite = true;
      out.value = std::numeric_limits<double>::infinity();
      out.maximizer.clear();
      out.converged = true;
      return out;
    }
    double val = -r.value;
    if (!have || val > out.value) {
      out.value = val;
      out.maximizer = r.x;
      out.converged = r.converged;
      have = true;
    }
  }
  if (out.value < 0.0) {
    out.value = 0.0;
    out.maximizer.assign(n, 0.0);
  }
  return out;
}

ConjugateValue conjugate_eval(const ConjugateOracle& oracle, std::span<const double> z) {
  return oracle(z);
}

double conjugate_of_gradient_identity_check(const CostFunction& f, std::span<const double> x,
                                            const ConjugateSettings& settings) {
  std::vector<double> g = f.grad(x);
  double inner = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) inner += x[i] * g[i];
  double closed = inner - f.value(x);
  ConjugateOracle oracle(f, settings);
  ConjugateValue v = oracle(g);
  if (v.infinite) return std::numeric_limits<double>::infinity();
  return std::abs(v.value - closed);
}

}  // namespace opd
