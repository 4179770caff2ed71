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

#include "opd/auction.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "opd/error.hpp"
#include "opd/kernels.hpp"
#include "opd/optim.hpp"

namespace opd {
namespace {

std::string buyer_prefix(std::size_t j) { return "buyer " + std::to_string(j + 1) + ": "; }

// min over the simplex of fhat*(R0 u) / R0.
double ray_infimum(const Polynomial& f, double R0) {
  const std::size_t n = f.dim();
  std::vector<double> u(n), g(n), best;
  double best_val = std::numeric_limits<double>::infinity();
  // Lattice of directions with resolution chosen so the lattice stays small.
  int res = n <= 2 ? 64 : n <= 4 ? 12 : n <= 8 ? 3 : 1;
  std::vector<int> counts(n, 0);
  auto visit = [&]() {
    for (std::size_t i = 0; i < n; ++i) u[i] = R0 * counts[i] / static_cast<double>(res);
    double v = f.value(u) / R0;
    if (v < best_val) {
      best_val = v;
      best.assign(counts.begin(), counts.end());
    }
  };
  // Enumerate compositions of res into n parts.
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == n) {
      counts[i] = left;
      visit();
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[i] = c;
      rec(i + 1, left - c);
    }
  };
  rec(0, res);
  std::vector<double> start(n);
  for (std::size_t i = 0; i < n; ++i) start[i] = best[i] / static_cast<double>(res);
  auto objective = [&](std::span<const double> p, std::span<double> grad) {
    for (std::size_t i = 0; i < n; ++i) u[i] = R0 * p[i];
    f.gradient(u, grad);
    return f.value(u) / R0;
  };
  optim::SpgSettings spg;
  spg.tol = 1e-13;
  spg.max_iter = 20000;
  optim::SpgResult r = optim::spg_minimize(objective, start, optim::project_simplex, spg);
  return std::min(best_val, r.value);
}

void check_auction_cost(const Polynomial& f) {
  for (const Monomial& m : f.monomials()) {
    for (const Rational& d : m.degrees) {
      if (!d.is_zero() && !d.is_integer() && d < Rational(2)) {
        throw InvalidPolynomial("auction cost degrees must be integers or >= 2");
      }
    }
  }
}

}  // namespace

void AuctionInstance::validate() const {
  if (n == 0 || n > kMaxAuctionItems) throw InvalidInstance("auction needs 1..16 items");
  if (cost_star.dim() != n) throw DimensionMismatch("cost dimension differs from item count");
  const std::size_t subsets = std::size_t{1} << n;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j].size() != subsets) {
      throw InvalidInstance(buyer_prefix(j) + "value table must cover all 2^n bundles");
    }
    for (double v : values[j]) {
      if (!std::isfinite(v)) throw InvalidInstance(buyer_prefix(j) + "non-finite value");
    }
  }
}

void subset_sums(std::span<const double> x, std::vector<double>& out) {
  const std::size_t subsets = std::size_t{1} << x.size();
  out.resize(subsets);
  out[0] = 0.0;
  for (std::size_t s = 1; s < subsets; ++s) {
    std::size_t low = static_cast<std::size_t>(__builtin_ctzll(s));
    out[s] = out[s & (s - 1)] + x[low];
  }
}

AuctionPrepared prepare_auction(const AuctionInstance& instance) {
  instance.validate();
  const std::size_t n = instance.n;
  AuctionPrepared prep;
  prep.c.assign(n, 0.0);
  std::vector<Monomial> rest;
  for (const Monomial& m : instance.cost_star.monomials()) {
    if (m.total_degree() == Rational(1)) {
      for (std::size_t i = 0; i < n; ++i) {
        if (m.degrees[i] == Rational(1)) prep.c[i] += m.coeff;
      }
    } else {
      rest.push_back(m);
    }
  }
  prep.fhat_star = Polynomial(n, std::move(rest));
  check_auction_cost(prep.fhat_star);
  std::vector<double> cs;
  subset_sums(prep.c, cs);
  for (const auto& v : instance.values) {
    std::vector<double> adj(v.size());
    for (std::size_t s = 0; s < v.size(); ++s) adj[s] = (v[s] - v[0]) - cs[s];
    adj[0] = 0.0;
    prep.shift.push_back(v[0]);
    prep.values.push_back(std::move(adj));
  }
  return prep;
}

EpsilonDelta compute_epsilon_delta(const Polynomial& fhat_star, std::span<const double> values,
                                   double rho) {
  EpsilonDelta out;
  out.beta = *std::max_element(values.begin(), values.end()) - values[0];
  if (!(out.beta > 0.0)) return out;
  if (fhat_star.empty()) throw Unbounded("purely linear cost with a positive-surplus buyer");
  const std::size_t n = fhat_star.dim();
  std::vector<double> corner(n, rho * static_cast<double>(n));
  std::vector<double> h = fhat_star.hessian(corner);
  for (std::size_t col = 0; col < n; ++col) {
    double s = 0.0;
    for (std::size_t row = 0; row < n; ++row) s += std::abs(h[row * n + col]);
    out.lipschitz = std::max(out.lipschitz, s);
  }
  if (!(out.lipschitz > 0.0)) throw InvalidPolynomial("cost has zero curvature");
  out.R0 = std::min(1.0, out.beta / (rho * out.lipschitz));
  double inf = ray_infimum(fhat_star, out.R0);
  if (!(inf > 0.0)) {
    throw InvalidPolynomial("cost does not grow superlinearly in every direction");
  }
  out.epsilon = inf / 10.0;
  out.delta = out.epsilon / (out.lipschitz * rho * static_cast<double>(n));
  out.resolved = true;
  return out;
}

void run_buyer(AuctionState& state, std::span<const double> values, const Polynomial& fhat_star,
               double rho, const AuctionSettings& settings) {
  const std::size_t n = state.z.size();
  const std::size_t subsets = std::size_t{1} << n;
  const std::size_t j = state.buyers.size();
  if (values.size() != subsets) throw InvalidInstance(buyer_prefix(j) + "incomplete value table");
  if (!state.params.resolved) {
    EpsilonDelta p = compute_epsilon_delta(fhat_star, values, rho);
    if (p.resolved) {
      p.buyer = j;
      state.params = p;
    }
  }
  BuyerRecord rec;
  rec.y.assign(subsets, 0.0);
  rec.audit_margin = std::numeric_limits<double>::infinity();
  const std::vector<double> z_start = state.z;

  std::vector<double> xs;
  subset_sums(state.x, xs);
  const kernels::Isa isa = kernels::active_isa();
  kernels::ArgMax pick = kernels::argmax_difference(values.data(), xs.data(), subsets, isa);

  if (!state.params.resolved || pick.value <= 0.0) {
    // No bundle beats the empty one: r(t) = 0 and x never moves.
    rec.y[0] = 1.0;
    rec.mass = 1.0;
  } else {
    const double delta = state.params.delta;
    const double eps = state.params.epsilon;
    const double full = std::floor(1.0 / delta);
    if (full + 1.0 > static_cast<double>(settings.max_steps)) {
      throw StepLimitExceeded(buyer_prefix(j) + "step size " + std::to_string(delta) +
                              " needs too many steps");
    }
    const auto steps_full = static_cast<std::uint64_t>(full);
    const double remainder = 1.0 - full * delta;
    std::vector<std::uint64_t> count(subsets, 0);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = rho * state.z[i];
    double f_prev = fhat_star.value(w);
    const std::uint64_t total = steps_full + (remainder > 0.0 ? 1 : 0);
    for (std::uint64_t s = 0; s < total; ++s) {
      const double step = s < steps_full ? delta : remainder;
      const std::uint32_t S = pick.index;
      const double r = pick.value;
      if (s < steps_full) ++count[S];
      rec.u += step * r;
      if (settings.trace) {
        if (!rec.trace.empty() && rec.trace.back().first == S) {
          ++rec.trace.back().second;
        } else {
          rec.trace.emplace_back(S, 1);
        }
      }
      if (S != 0) {
        const double xs_start = xs[S];
        for (std::size_t i = 0; i < n; ++i) {
          if (S >> i & 1U) state.z[i] += step;
        }
        for (std::size_t i = 0; i < n; ++i) w[i] = rho * state.z[i];
        fhat_star.gradient(w, state.x);
        double f_now = fhat_star.value(w);
        rec.budget += (f_now - f_prev) / rho - step * xs_start;
        f_prev = f_now;
        rec.R += step;
        subset_sums(state.x, xs);
        pick = kernels::argmax_difference(values.data(), xs.data(), subsets, isa);
        double gamma_s = values[S] - xs[S];
        rec.audit_margin = std::min(rec.audit_margin, gamma_s - pick.value + eps);
      } else {
        rec.audit_margin = std::min(rec.audit_margin, eps);
      }
      ++rec.steps;
      if (s + 1 == total && remainder > 0.0) rec.y[S] += remainder;
    }
    for (std::size_t S = 0; S < subsets; ++S) rec.y[S] += static_cast<double>(count[S]) * delta;
    rec.mass = 0.0;
    for (double m : rec.y) rec.mass += m;
    // Recompute z from the allocation so it equals A^T y up to rounding.
    state.z = z_start;
    for (std::size_t S = 1; S < subsets; ++S) {
      if (rec.y[S] == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) {
        if (S >> i & 1U) state.z[i] += rec.y[S];
      }
    }
    for (std::size_t i = 0; i < n; ++i) w[i] = rho * state.z[i];
    fhat_star.gradient(w, state.x);
  }
  if (!std::isfinite(rec.audit_margin)) rec.audit_margin = state.params.epsilon;
  subset_sums(state.x, xs);
  rec.u_posthoc = std::max(0.0, kernels::argmax_difference(values.data(), xs.data(), subsets, isa).value);
  state.buyers.push_back(std::move(rec));
  state.x_after.push_back(state.x);
  state.z_after.push_back(state.z);
}

AuctionRun run_auction(const AuctionInstance& instance, std::optional<double> rho,
                       const AuctionSettings& settings) {
  AuctionRun run;
  run.prep = prepare_auction(instance);
  if (rho) {
    if (!(*rho > 0.0)) throw DegenerateParameters("rho must be positive");
    run.rho = *rho;
    run.rho_from_formula = false;
  }
  run.state.z.assign(instance.n, 0.0);
  run.state.x.assign(instance.n, 0.0);
  for (const auto& v : run.prep.values) run_buyer(run.state, v, run.prep.fhat_star, run.rho, settings);
  return run;
}

}  // namespace opd
