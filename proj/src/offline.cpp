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

#include "opd/offline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "opd/error.hpp"
#include "opd/optim.hpp"

namespace opd {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

struct Candidate {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  double kkt = std::numeric_limits<double>::infinity();
};

double covering_kkt(const CostFunction& f, const std::vector<std::vector<double>>& rows,
                    std::span<const double> x, std::span<const double> mult) {
  std::vector<double> g = f.grad(x);
  const double scale = std::max({1.0, std::abs(f.value(x)), inf_norm(g)});
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = g[i];
    for (std::size_t j = 0; j < rows.size(); ++j) s -= mult[j] * rows[j][i];
    worst = std::max(worst, std::abs(std::min(x[i], s)));
  }
  for (std::size_t j = 0; j < rows.size(); ++j) {
    double ax = dot(rows[j], x);
    worst = std::max(worst, std::max(0.0, 1.0 - ax));
    worst = std::max(worst, std::abs(mult[j] * (ax - 1.0)));
  }
  return worst / scale;
}

void make_feasible(const std::vector<std::vector<double>>& rows, std::vector<double>& x) {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& a : rows) s = std::min(s, dot(a, x));
  if (s > 0.0 && s < 1.0) {
    for (double& v : x) v /= s;
  }
}

Candidate augmented_lagrangian(const CostFunction& f, const std::vector<std::vector<double>>& rows,
                               std::vector<double> x) {
  const std::size_t m = rows.size();
  std::vector<double> mult(m, 0.0);
  double M = 10.0;
  double prev_viol = std::numeric_limits<double>::infinity();
  optim::SpgSettings spg;
  spg.tol = 1e-12;
  spg.max_iter = 20000;
  for (int outer = 0; outer < 80; ++outer) {
    auto objective = [&](std::span<const double> p, std::span<double> grad) {
      f.gradient(p, grad);
      double val = f.value(p);
      for (std::size_t j = 0; j < m; ++j) {
        double t = std::max(0.0, mult[j] + M * (1.0 - dot(rows[j], p)));
        val += (t * t - mult[j] * mult[j]) / (2.0 * M);
        if (t > 0.0) {
          for (std::size_t i = 0; i < p.size(); ++i) grad[i] -= t * rows[j][i];
        }
      }
      return val;
    };
    x = optim::spg_minimize(objective, x, optim::clamp_nonnegative, spg).x;
    double viol = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double ax = dot(rows[j], x);
      viol = std::max(viol, 1.0 - ax);
      mult[j] = std::max(0.0, mult[j] + M * (1.0 - ax));
    }
    viol = std::max(viol, 0.0);
    if (viol < 1e-10 && covering_kkt(f, rows, x, mult) < 1e-9) break;
    if (viol > 0.25 * prev_viol && M < 1e12) M *= 10.0;
    prev_viol = viol;
  }
  make_feasible(rows, x);
  Candidate c;
  c.value = f.value(x);
  c.kkt = covering_kkt(f, rows, x, mult);
  c.x = std::move(x);
  return c;
}

struct GridOutcome {
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> x;
  int levels = 0;
  double change = std::numeric_limits<double>::infinity();
};

GridOutcome grid_refine(const CostFunction& f, const std::vector<std::vector<double>>& rows,
                        const std::vector<double>& U) {
  const std::size_t n = U.size();
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < n; ++i) {
    if (U[i] > 0.0) live.push_back(i);
  }
  const std::size_t k = live.size();
  const int G = k <= 1 ? 101 : k == 2 ? 41 : k == 3 ? 15 : k == 4 ? 9 : 7;
  std::vector<double> center(n, 0.0), half(n, 0.0);
  for (std::size_t i : live) {
    center[i] = U[i] / 2.0;
    half[i] = U[i] / 2.0;
  }
  GridOutcome out;
  std::vector<double> d(n, 0.0), x(n), best_d = center;
  std::vector<int> digit(k, 0);
  double prev = std::numeric_limits<double>::infinity();
  for (int level = 0; level < 60; ++level) {
    std::fill(digit.begin(), digit.end(), 0);
    double level_best = out.value;
    while (true) {
      for (std::size_t t = 0; t < k; ++t) {
        std::size_t i = live[t];
        double v = center[i] + half[i] * (2.0 * digit[t] / (G - 1) - 1.0);
        d[i] = std::clamp(v, 0.0, U[i]);
      }
      double s = std::numeric_limits<double>::infinity();
      for (const auto& a : rows) s = std::min(s, dot(a, d));
      if (s > 0.0) {
        for (std::size_t i = 0; i < n; ++i) x[i] = d[i] / s;
        double val = f.value(x);
        if (val < level_best) {
          level_best = val;
          best_d = d;
          out.x = x;
        }
      }
      std::size_t t = 0;
      while (t < k && ++digit[t] == G) digit[t++] = 0;
      if (t == k) break;
    }
    out.value = level_best;
    out.levels = level + 1;
    center = best_d;
    for (std::size_t i : live) half[i] *= 3.0 / (G - 1);
    if (std::isfinite(prev)) {
      out.change = std::abs(prev - out.value) / std::max(std::abs(out.value), 1e-300);
      if (out.levels >= 3 && out.change < 1e-12) break;
    }
    prev = out.value;
  }
  return out;
}

}  // namespace

const char* status_name(OracleStatus status) {
  switch (status) {
    case OracleStatus::kConverged: return "converged";
    case OracleStatus::kGridCertified: return "grid-certified";
    case OracleStatus::kFailed: return "failed";
    case OracleStatus::kUnbounded: return "unbounded";
  }
  return "failed";
}

OracleResult covering_opt(const CostFunction& f, const std::vector<std::vector<double>>& rows,
                          const CoveringOracleSettings& settings) {
  const std::size_t n = f.dim();
  OracleResult res;
  if (rows.empty()) {
    res.point.assign(n, 0.0);
    res.status = OracleStatus::kConverged;
    return res;
  }
  std::vector<double> U(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double amin = std::numeric_limits<double>::infinity();
    for (const auto& a : rows) {
      if (a[i] > 0.0) amin = std::min(amin, a[i]);
    }
    if (std::isfinite(amin)) U[i] = 1.0 / amin;
  }

  std::mt19937_64 rng(settings.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Candidate best;
  for (int r = 0; r < settings.restarts; ++r) {
    std::vector<double> x0(n);
    for (std::size_t i = 0; i < n; ++i) x0[i] = r == 0 ? U[i] / 2.0 : U[i] * unit(rng);
    Candidate c = augmented_lagrangian(f, rows, x0);
    bool better = c.value < best.value;
    bool c_ok = c.kkt < 1e-7;
    bool best_ok = best.kkt < 1e-7;
    if ((c_ok && !best_ok) || (c_ok == best_ok && better)) best = std::move(c);
  }
  res.descent_value = best.value;
  res.kkt_residual = best.kkt;
  res.value = best.value;
  res.point = best.x;
  const bool descent_ok = best.kkt < 1e-7;

  if (n > settings.grid_max_dim) {
    res.status = descent_ok ? OracleStatus::kConverged : OracleStatus::kFailed;
    return res;
  }
  GridOutcome grid = grid_refine(f, rows, U);
  res.grid_used = true;
  res.grid_value = grid.value;
  res.grid_levels = grid.levels;
  res.grid_change = grid.change;
  const bool grid_ok = grid.levels >= 3 && grid.change < 1e-6;
  const double denom = std::max({std::abs(best.value), std::abs(grid.value), 1e-300});
  const bool agree = std::abs(best.value - grid.value) <= settings.agreement * denom;
  if (!agree) {
    res.status = OracleStatus::kFailed;
    return res;
  }
  if (grid.value < best.value) {
    res.value = grid.value;
    res.point = grid.x;
  }
  if (descent_ok) {
    res.status = OracleStatus::kConverged;
  } else if (grid_ok) {
    res.status = OracleStatus::kGridCertified;
  } else {
    res.status = OracleStatus::kFailed;
  }
  return res;
}

OracleResult packing_opt(const Polynomial& cost_star, const std::vector<std::vector<double>>& rows,
                         std::uint64_t seed) {
  const std::size_t n = cost_star.dim();
  const std::size_t m = rows.size();
  OracleResult res;
  res.status = OracleStatus::kConverged;
  if (m == 0) return res;
  std::vector<double> z(n), g(n);
  auto objective = [&](std::span<const double> y, std::span<double> grad) {
    std::fill(z.begin(), z.end(), 0.0);
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      sum += y[j];
      for (std::size_t i = 0; i < n; ++i) z[i] += y[j] * rows[j][i];
    }
    cost_star.gradient(z, g);
    for (std::size_t j = 0; j < m; ++j) grad[j] = -1.0 + dot(rows[j], g);
    return cost_star.value(z) - sum;
  };
  optim::SpgSettings spg;
  spg.tol = 1e-12;
  spg.max_iter = 100000;
  spg.divergence = 1e12;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool have = false;
  for (int r = 0; r < 4; ++r) {
    std::vector<double> y0(m, 0.0);
    if (r > 0) {
      for (double& v : y0) v = unit(rng);
    }
    optim::SpgResult out = optim::spg_minimize(objective, y0, optim::clamp_nonnegative, spg);
    if (out.diverged) {
      res.status = OracleStatus::kUnbounded;
      res.value = std::numeric_limits<double>::infinity();
      res.point = out.x;
      return res;
    }
    if (!have || -out.value > res.value) {
      res.value = -out.value;
      res.point = out.x;
      have = true;
    }
  }
  std::vector<double> grad(m);
  objective(res.point, grad);
  const double scale = std::max(1.0, std::abs(res.value));
  double worst = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double dP = -grad[j];
    worst = std::max(worst, res.point[j] > 0.0 ? std::abs(dP) : std::max(0.0, dP));
  }
  res.kkt_residual = worst / scale;
  res.status = res.kkt_residual < 1e-7 ? OracleStatus::kConverged : OracleStatus::kFailed;
  return res;
}

OracleResult auction_opt(const Polynomial& cost_star, const std::vector<std::vector<double>>& values,
                         std::uint64_t seed) {
  const std::size_t n = cost_star.dim();
  const std::size_t subsets = std::size_t{1} << n;
  const std::size_t block = subsets - 1;
  const std::size_t buyers = values.size();
  OracleResult res;
  res.status = OracleStatus::kConverged;
  if (buyers == 0) return res;
  for (const auto& v : values) {
    if (v.size() != subsets) throw InvalidInstance("value table must cover all bundles");
  }
  std::vector<double> z(n), g(n), gs(subsets);
  auto objective = [&](std::span<const double> y, std::span<double> grad) {
    std::fill(z.begin(), z.end(), 0.0);
    double welfare = 0.0;
    for (std::size_t j = 0; j < buyers; ++j) {
      for (std::size_t S = 1; S < subsets; ++S) {
        double m = y[j * block + S - 1];
        if (m == 0.0) continue;
        welfare += values[j][S] * m;
        for (std::size_t i = 0; i < n; ++i) {
          if (S >> i & 1U) z[i] += m;
        }
      }
    }
    cost_star.gradient(z, g);
    gs[0] = 0.0;
    for (std::size_t S = 1; S < subsets; ++S) {
      gs[S] = gs[S & (S - 1)] + g[static_cast<std::size_t>(__builtin_ctzll(S))];
    }
    for (std::size_t j = 0; j < buyers; ++j) {
      for (std::size_t S = 1; S < subsets; ++S) grad[j * block + S - 1] = gs[S] - values[j][S];
    }
    return cost_star.value(z) - welfare;
  };
  auto project = [&](std::span<double> y) {
    for (std::size_t j = 0; j < buyers; ++j) optim::project_capped_simplex(y.subspan(j * block, block));
  };
  optim::SpgSettings spg;
  spg.tol = 1e-12;
  spg.max_iter = 100000;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool have = false;
  for (int r = 0; r < 3; ++r) {
    std::vector<double> y0(buyers * block, 0.0);
    if (r > 0) {
      for (double& v : y0) v = unit(rng);
    }
    optim::SpgResult out = optim::spg_minimize(objective, y0, project, spg);
    if (!have || -out.value > res.value) {
      res.value = -out.value;
      res.point = out.x;
      have = true;
    }
  }
  std::vector<double> grad(res.point.size());
  objective(res.point, grad);
  const double scale = std::max(1.0, std::abs(res.value));
  res.kkt_residual = optim::projected_gradient_norm(res.point, grad, project) / scale;
  res.status = res.kkt_residual < 1e-7 ? OracleStatus::kConverged : OracleStatus::kFailed;
  return res;
}

}  // namespace opd
