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

#include "opd/packing.hpp"

#include <cmath>
#include <limits>

#include "opd/error.hpp"

namespace opd {
namespace {

constexpr double kBracketStart = 1e-6;
constexpr double kDivergence = 1e15;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

void PackingInstance::validate() const {
  if (cost_star.dim() != n) throw DimensionMismatch("cost dimension differs from instance dimension");
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    if (rounds[k].size() != n) {
      throw DimensionMismatch("round " + std::to_string(k + 1) + ": request has wrong length");
    }
    for (double v : rounds[k]) {
      if (!std::isfinite(v) || v < 0.0) {
        throw InvalidInstance("round " + std::to_string(k + 1) + ": entries must be finite and >= 0");
      }
    }
  }
}

PackingPreprocessed preprocess_linear(const PackingInstance& instance) {
  instance.validate();
  const std::size_t n = instance.n;
  PackingPreprocessed pre;
  pre.c.assign(n, 0.0);
  std::vector<Monomial> rest;
  for (const Monomial& m : instance.cost_star.monomials()) {
    if (m.total_degree() == Rational(1)) {
      for (std::size_t i = 0; i < n; ++i) {
        if (m.degrees[i] == Rational(1)) pre.c[i] += m.coeff;
      }
    } else {
      rest.push_back(m);
    }
  }
  pre.fhat_star = Polynomial(n, std::move(rest));
  pre.lambda = pre.fhat_star.profile().min_degree;
  pre.tau = pre.fhat_star.tau();
  bool any_live = false;
  for (const auto& a : instance.rounds) {
    double b = 1.0 - dot(a, pre.c);
    pre.b.push_back(b);
    bool skip = !(b > 0.0);
    pre.skip.push_back(skip);
    std::vector<double> s;
    if (!skip) {
      any_live = true;
      for (double v : a) s.push_back(v / b);
    }
    pre.scaled.push_back(std::move(s));
  }
  if (pre.fhat_star.empty() && any_live) {
    throw Unbounded("purely linear cost with a request of positive surplus (b_k > 0)");
  }
  return pre;
}

double run_packing_round(PackingState& state, std::span<const double> a_scaled,
                         const Polynomial& fhat_star, double rho, double lambda) {
  const std::size_t n = state.z.size();
  std::vector<double> w(n), g(n);
  auto along = [&](double t) {
    for (std::size_t i = 0; i < n; ++i) w[i] = rho * (state.z[i] + t * a_scaled[i]);
    fhat_star.gradient(w, g);
    return dot(a_scaled, g);
  };
  const std::size_t k = state.w.size();
  double t = 0.0;
  if (along(0.0) < 1.0) {
    double lo = 0.0;
    double hi = kBracketStart;
    while (along(hi) < 1.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > kDivergence) {
        throw Unbounded("round " + std::to_string(k + 1) +
                        ": request never saturates (cost does not grow along it)");
      }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
      double mid = 0.5 * (lo + hi);
      if (along(mid) < 1.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    t = hi;
    // dP/dt = 1 - <a, grad fhat*(z(t))> at interior points of the growth.
    const double floor = 1.0 - std::pow(rho, 1.0 - lambda);
    for (int s = 1; s < 8; ++s) {
      double ts = t * s / 8.0;
      for (std::size_t i = 0; i < n; ++i) w[i] = state.z[i] + ts * a_scaled[i];
      fhat_star.gradient(w, g);
      double margin = (1.0 - dot(a_scaled, g)) - floor;
      state.growth_margin = std::min(state.growth_margin, margin);
    }
  }
  for (std::size_t i = 0; i < n; ++i) state.z[i] += t * a_scaled[i];
  for (std::size_t i = 0; i < n; ++i) w[i] = rho * state.z[i];
  fhat_star.gradient(w, state.x);
  state.w.push_back(t);
  return t;
}

double packing_rho(const Rational& lambda) {
  const double l = lambda.to_double();
  if (!(l > 1.0)) throw DegenerateParameters("packing needs min degree > 1 after linear terms");
  return std::pow(l, 1.0 / (l - 1.0));
}

double packing_certificate(double tau, double lambda, double rho) {
  return (tau - 1.0) * std::pow(rho, lambda) / (std::pow(rho, lambda - 1.0) - 1.0);
}

PackingRun run_packing(const PackingInstance& instance, std::optional<double> rho) {
  PackingRun run;
  run.pre = preprocess_linear(instance);
  const std::size_t n = instance.n;
  const double lambda = run.pre.lambda.to_double();
  if (rho) {
    if (!(*rho > 1.0)) throw DegenerateParameters("packing rho must exceed 1");
    run.rho = *rho;
    run.rho_from_formula = false;
  } else if (!run.pre.fhat_star.empty()) {
    run.rho = packing_rho(run.pre.lambda);
  } else {
    run.rho = 2.0;
  }
  run.certificate = run.pre.fhat_star.empty()
                        ? std::numeric_limits<double>::infinity()
                        : packing_certificate(run.pre.tau, lambda, run.rho);
  PackingState& st = run.state;
  st.z.assign(n, 0.0);
  st.x.assign(n, 0.0);
  for (std::size_t k = 0; k < instance.rounds.size(); ++k) {
    if (run.pre.skip[k]) {
      st.w.push_back(0.0);
      st.y.push_back(0.0);
    } else {
      double wk = run_packing_round(st, run.pre.scaled[k], run.pre.fhat_star, run.rho, lambda);
      st.y.push_back(wk / run.pre.b[k]);
    }
    st.x_after.push_back(st.x);
    st.z_after.push_back(st.z);
  }
  return run;
}

double dual_cost_at(const Polynomial& fhat_star, std::span<const double> w) {
  std::vector<double> x = fhat_star.grad(w);
  return dot(w, x) - fhat_star.value(w);
}

}  // namespace opd
