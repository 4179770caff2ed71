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

#include "opd/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "opd/error.hpp"
#include "opd/polynomial.hpp"
#include "opd/surrogate.hpp"

namespace opd {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::string round_prefix(std::size_t k) { return "round " + std::to_string(k + 1) + ": "; }

// Largest t in [0, t_max] keeping grad_i f(x + t e_i) exactly zero.
double free_increase(const CostFunction& cost, std::vector<double>& x, std::size_t i,
                     double t_max, std::vector<double>& g) {
  const double base = x[i];
  auto zero_at = [&](double t) {
    x[i] = base + t;
    cost.gradient(x, g);
    return g[i] == 0.0;
  };
  if (zero_at(t_max)) return t_max;
  double lo = 0.0;
  double hi = t_max;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (zero_at(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  x[i] = base + lo;
  return lo;
}

}  // namespace

void CoveringInstance::validate() const {
  if (!cost) throw InvalidInstance("covering instance has no cost");
  if (cost->dim() != n) throw DimensionMismatch("cost dimension differs from instance dimension");
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    const auto& a = rounds[k];
    if (a.size() != n) throw DimensionMismatch(round_prefix(k) + "constraint has wrong length");
    bool positive = false;
    for (double v : a) {
      if (!std::isfinite(v) || v < 0.0) {
        throw InvalidInstance(round_prefix(k) + "constraint entries must be finite and >= 0");
      }
      positive = positive || v > 0.0;
    }
    if (!positive) throw InvalidInstance(round_prefix(k) + "constraint has no positive entry");
  }
}

PrimalDualState make_state(std::size_t n, std::span<const double> L) {
  PrimalDualState s;
  s.x.assign(n, 0.0);
  if (!L.empty()) {
    if (L.size() != n) throw DimensionMismatch("initial L has wrong length");
    std::copy(L.begin(), L.end(), s.x.begin());
  }
  s.z.assign(n, 0.0);
  return s;
}

void run_round(PrimalDualState& state, std::span<const double> a, const CostFunction& cost,
               const RoundParams& params) {
  const std::size_t n = state.x.size();
  const std::size_t k = state.y.size();
  if (a.size() != n) throw DimensionMismatch(round_prefix(k) + "constraint has wrong length");
  std::vector<double>& x = state.x;
  RoundRecord rec;
  rec.f_before = cost.value(x);

  if (params.eta > 0.0) {
    bool seeded = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] > 0.0 && x[i] < params.eta) {
        x[i] = params.eta;
        seeded = true;
      }
    }
    if (seeded) rec.seed_cost = cost.value(x) - rec.f_before;
  }

  double f_cur = cost.value(x);
  double cover = dot(a, x);
  double y = 0.0;
  std::vector<double> g(n), rate(n), x_new(n);
  const double target = 1.0 - params.tol_feas;

  while (cover < 1.0) {
    if (rec.steps >= params.max_steps) {
      throw StepLimitExceeded(round_prefix(k) + "exceeded " + std::to_string(params.max_steps) +
                              " integration steps");
    }
    cost.gradient(x, g);
    bool moved = false;
    for (std::size_t i = 0; i < n && cover < 1.0; ++i) {
      if (a[i] > 0.0 && g[i] == 0.0) {
        double t = free_increase(cost, x, i, (1.0 - cover) / a[i], rate);
        if (t > 0.0) {
          moved = true;
          ++rec.free_moves;
          cover = dot(a, x);
        }
      }
    }
    if (moved) {
      f_cur = cost.value(x);
      continue;
    }

    double flow = 0.0;
    double h_cap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      rate[i] = 0.0;
      if (a[i] > 0.0 && x[i] > 0.0 && std::isfinite(g[i])) {
        rate[i] = params.rho * a[i] * x[i] / g[i];
        flow += a[i] * rate[i];
        h_cap = std::min(h_cap, params.step_rel * x[i] / rate[i]);
      }
    }
    if (!(flow > 0.0) || !std::isfinite(flow)) {
      throw StallError(round_prefix(k) + "no coordinate can increase (x_i = 0 or infinite gradient)");
    }
    double need = 1.0 - cover;
    double h = std::min(h_cap, need / flow);
    bool landing = h < h_cap;
    double lin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double dx = h * rate[i];
      x_new[i] = x[i] + dx;
      lin += g[i] * dx;
    }
    if (x_new == x) throw StallError(round_prefix(k) + "step underflow");
    double f_new = cost.value(x_new);
    rec.budget += std::max(0.0, f_new - f_cur - lin);
    x.swap(x_new);
    f_cur = f_new;
    y += h;
    for (std::size_t i = 0; i < n; ++i) state.z[i] += h * a[i];
    ++rec.steps;
    cover = dot(a, x);
    if (landing && cover >= target) break;
  }

  rec.y = y;
  rec.f_after = f_cur;
  rec.slack = cover - 1.0;
  state.y.push_back(y);
  state.round_log.push_back(rec);
  state.x_after.push_back(x);
}

const char* mode_name(CoveringMode mode) {
  switch (mode) {
    case CoveringMode::kGeneral: return "general";
    case CoveringMode::kSharp: return "sharp";
    case CoveringMode::kHomogeneous: return "homogeneous";
    case CoveringMode::kGeneralPoly: return "general-poly";
    case CoveringMode::kLp: return "lp";
  }
  return "general";
}

std::optional<CoveringMode> parse_covering_mode(const std::string& name) {
  for (CoveringMode m : {CoveringMode::kGeneral, CoveringMode::kSharp, CoveringMode::kHomogeneous,
                         CoveringMode::kGeneralPoly, CoveringMode::kLp}) {
    if (name == mode_name(m)) return m;
  }
  return std::nullopt;
}

GeneralParams resolve_params_general(const CoveringInstance& instance, std::span<const double> L) {
  const std::size_t n = instance.n;
  if (L.size() != n) throw DimensionMismatch("L has wrong length");
  GeneralParams out;
  out.U.assign(n, 0.0);
  out.mu = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(L[i] > 0.0)) throw DegenerateParameters("L must be positive in every coordinate");
    double amin = std::numeric_limits<double>::infinity();
    for (const auto& a : instance.rounds) {
      if (a[i] > 0.0) amin = std::min(amin, a[i]);
    }
    out.U[i] = std::isfinite(amin) ? std::max(L[i], 1.0 / amin) : L[i];
    out.mu = std::max(out.mu, out.U[i] / L[i]);
  }
  const double tau = instance.cost->tau();
  const double lnmu = std::log(out.mu);
  if (!(lnmu > 0.0)) throw DegenerateParameters("mu = 1 leaves no room to move (rho = 0)");
  out.rho = std::pow(tau, tau - 1.0) * std::pow(lnmu, tau);
  out.additive = tau * instance.cost->value(L);
  return out;
}

SharpParams resolve_params_sharp(double tau, double lambda) {
  if (!(lambda > 0.0)) throw DegenerateParameters("lambda must be positive");
  SharpParams out;
  out.rho = std::pow(tau, tau - 1.0) / std::pow(lambda, tau);
  out.bound = std::pow(tau / lambda, tau);
  return out;
}

SharpParams resolve_params_sharp(const CostFunction& cost) {
  auto lam = cost.lambda_mono();
  if (!lam) throw DegenerateParameters("cost has no lambda-monotone gradient certificate");
  return resolve_params_sharp(cost.tau(), *lam);
}

double CoveringPlan::guarantee(double copt, double extra) const {
  const double tau = original->tau();
  switch (mode) {
    case CoveringMode::kGeneral:
      return std::pow(tau * std::log(mu), tau) * copt + tau * (cost_at_L + extra);
    case CoveringMode::kSharp:
      return std::pow(tau / lambda_bound, tau) * copt + tau * extra;
    case CoveringMode::kHomogeneous: {
      const double lam = lambda->to_double();
      const double th = tau_run;
      double inner = std::pow(th / lam, th) * 2.0 * std::pow(n_count, 2.0 * tau * lam) *
                         std::pow(copt, 1.0 + lam) +
                     th * extra;
      return std::pow(std::pow(n_count, lam * tau) * inner, 1.0 / (1.0 + lam));
    }
    case CoveringMode::kGeneralPoly: {
      const double lam = lambda->to_double();
      const double tt = tau_run;
      double inner = std::pow(tt * N_pow_lambda / lam, tt) * std::pow(copt, 1.0 + lam) + tt * extra;
      return std::pow(N_pow_lambda * inner, 1.0 / (1.0 + lam));
    }
    case CoveringMode::kLp: {
      const double lam = lambda->to_double();
      const double p = tau;
      const double d = n_count;
      return std::pow(d, lam * p / (1.0 + lam)) *
             (std::pow(p / lam, p) * std::pow(2.0 * std::pow(d, 2.0 * lam * p), 1.0 / (1.0 + lam)) *
                  copt +
              p * extra);
    }
  }
  return std::numeric_limits<double>::infinity();
}

std::string CoveringPlan::bound_chain() const {
  std::ostringstream os;
  os.precision(6);
  const double tau = original->tau();
  switch (mode) {
    case CoveringMode::kGeneral:
      os << "(tau ln mu)^tau = (" << tau << "*ln " << mu << ")^" << tau << " = "
         << std::pow(tau * std::log(mu), tau) << "; additive tau*C(L) = " << tau * cost_at_L;
      break;
    case CoveringMode::kSharp:
      os << "(tau/lambda)^tau = (" << tau << "/" << lambda_bound << ")^" << tau << " = "
         << ratio_bound();
      break;
    case CoveringMode::kHomogeneous: {
      const double lam = lambda->to_double();
      os << "(tau(1+l)/l)^tau * 2^(1/(1+l)) * n^(3 l tau/(1+l)) with tau=" << tau
         << " l=" << lambda->to_string() << " n=" << n_count << ": "
         << std::pow(tau_run / lam, tau) << " * " << std::pow(2.0, 1.0 / (1.0 + lam)) << " * "
         << std::pow(n_count, 3.0 * lam * tau / (1.0 + lam)) << " = " << ratio_bound();
      break;
    }
    case CoveringMode::kGeneralPoly: {
      const double lam = lambda->to_double();
      os << "N^(l/(1+l)) * (tau~ N^l/l)^tau with tau~=" << tau_run << " N^l=" << N_pow_lambda
         << " l=" << lambda->to_string() << ": " << std::pow(N_pow_lambda, lam / (1.0 + lam))
         << " * " << std::pow(tau_run * N_pow_lambda / lam, tau) << " = " << ratio_bound();
      break;
    }
    case CoveringMode::kLp: {
      const double lam = lambda->to_double();
      os << "(p/l)^p * 2^(1/(1+l)) * d^(3 l p/(1+l)) with p=" << tau << " l=" << lambda->to_string()
         << " d=" << n_count << ": " << std::pow(tau / lam, tau) << " * "
         << std::pow(2.0, 1.0 / (1.0 + lam)) << " * "
         << std::pow(n_count, 3.0 * lam * tau / (1.0 + lam)) << " = " << ratio_bound();
      break;
    }
  }
  return os.str();
}

double default_seed_floor(const CoveringInstance& instance, double factor) {
  double scale = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < instance.n; ++i) {
    double amax = 0.0;
    for (const auto& a : instance.rounds) amax = std::max(amax, a[i]);
    if (amax > 0.0) scale = std::min(scale, 1.0 / amax);
  }
  if (!std::isfinite(scale)) scale = 1.0;
  return factor * scale;
}

std::vector<double> default_general_L(const CoveringInstance& instance) {
  std::vector<double> L(instance.n, 1e-3);
  for (std::size_t i = 0; i < instance.n; ++i) {
    double amax = 0.0;
    for (const auto& a : instance.rounds) amax = std::max(amax, a[i]);
    if (amax > 0.0) L[i] = 1e-3 / amax;
  }
  return L;
}

CoveringPlan plan_covering(const CoveringInstance& instance, CoveringMode mode,
                           const CoveringConfig& config) {
  instance.validate();
  CoveringPlan plan;
  plan.mode = mode;
  plan.original = instance.cost;
  plan.run_cost = instance.cost;
  plan.L.assign(instance.n, 0.0);
  plan.eta = default_seed_floor(instance, config.eta_factor);
  auto poly = std::dynamic_pointer_cast<const Polynomial>(instance.cost);

  switch (mode) {
    case CoveringMode::kGeneral: {
      plan.L = config.initial_L ? *config.initial_L : default_general_L(instance);
      GeneralParams gp = resolve_params_general(instance, plan.L);
      plan.rho = gp.rho;
      plan.mu = gp.mu;
      plan.cost_at_L = instance.cost->value(plan.L);
      plan.eta = 0.0;
      plan.dual_bound = DualBound::kLogMu;
      plan.tau_run = instance.cost->tau();
      break;
    }
    case CoveringMode::kSharp: {
      SharpParams sp = resolve_params_sharp(*instance.cost);
      plan.rho = sp.rho;
      plan.lambda_bound = *instance.cost->lambda_mono();
      plan.tau_run = instance.cost->tau();
      break;
    }
    case CoveringMode::kHomogeneous: {
      if (!poly) throw InvalidInstance("homogeneous mode needs a polynomial cost");
      Rational lam = default_lambda(instance.n);
      HomogeneousSurrogate s = build_fhat(*poly, lam);
      plan.run_cost = std::make_shared<Polynomial>(std::move(s.fhat));
      plan.lambda = lam;
      plan.lambda_bound = lam.to_double();
      plan.tau_run = (poly->profile().tau * (Rational(1) + lam)).to_double();
      plan.rho = resolve_params_sharp(plan.tau_run, plan.lambda_bound).rho;
      plan.n_count = static_cast<double>(instance.n);
      break;
    }
    case CoveringMode::kGeneralPoly: {
      if (!poly) throw InvalidInstance("general-poly mode needs a polynomial cost");
      if (poly->empty()) throw InvalidInstance("general-poly mode needs a non-zero polynomial");
      Rational lam = default_lambda(poly->size());
      GeneralSurrogate s = build_ftilde(*poly, lam);
      const double l = lam.to_double();
      plan.run_cost = std::make_shared<Polynomial>(std::move(s.ftilde));
      plan.comparison = std::make_shared<PowerOfCost>(instance.cost, l);
      plan.lambda = lam;
      plan.lambda_bound = l;
      plan.tau_run = s.tau_tilde.to_double();
      plan.N_pow_lambda = std::pow(static_cast<double>(s.N), l);
      plan.rho = std::pow(plan.N_pow_lambda / l, plan.tau_run) *
                 std::pow(plan.tau_run, plan.tau_run - 1.0);
      break;
    }
    case CoveringMode::kLp: {
      auto forms = std::dynamic_pointer_cast<const SumOfPoweredForms>(instance.cost);
      if (!forms) throw InvalidInstance("lp mode needs a sum-of-powered-forms cost");
      Rational lam = default_lambda(forms->sparsity());
      auto h = std::make_shared<PowerOfLinearForms>(forms->forms(), forms->p(), lam);
      plan.run_cost = h;
      plan.lambda = lam;
      plan.lambda_bound = lam.to_double();
      plan.tau_run = forms->p();
      plan.rho = resolve_params_sharp(plan.tau_run, plan.lambda_bound).rho;
      plan.n_count = static_cast<double>(forms->sparsity());
      break;
    }
  }
  if (config.rho) {
    if (!(*config.rho > 0.0)) throw DegenerateParameters("rho must be positive");
    plan.rho = *config.rho;
    plan.rho_from_formula = false;
  }
  return plan;
}

PrimalDualState run_covering(const CoveringInstance& instance, const CoveringPlan& plan,
                             const CoveringConfig& config) {
  instance.validate();
  PrimalDualState state = make_state(instance.n, plan.L);
  RoundParams params;
  params.rho = plan.rho;
  params.eta = plan.eta;
  params.step_rel = config.step_rel;
  params.max_steps = config.max_steps;
  params.tol_feas = config.tol_feas;
  for (const auto& a : instance.rounds) run_round(state, a, *plan.run_cost, params);
  return state;
}

PipelineResult run_homogeneous_pipeline(const CoveringInstance& instance,
                                        const CoveringConfig& config) {
  PipelineResult r;
  r.plan = plan_covering(instance, CoveringMode::kHomogeneous, config);
  r.state = run_covering(instance, r.plan, config);
  return r;
}

PipelineResult run_general_poly_pipeline(const CoveringInstance& instance,
                                         const CoveringConfig& config) {
  PipelineResult r;
  r.plan = plan_covering(instance, CoveringMode::kGeneralPoly, config);
  r.state = run_covering(instance, r.plan, config);
  return r;
}

PipelineResult run_lp_pipeline(const CoveringInstance& instance, const CoveringConfig& config) {
  PipelineResult r;
  r.plan = plan_covering(instance, CoveringMode::kLp, config);
  r.state = run_covering(instance, r.plan, config);
  return r;
}

}  // namespace opd
