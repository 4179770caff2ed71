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

// Online convex covering: min f(x) s.t. <a_k, x> >= 1 for constraints that
// arrive one at a time; x may only increase. Each round integrates
//   dx_i/dy_k = rho a_ki x_i / grad_i f(x),   dz_i/dy_k = a_ki
// until the new constraint holds.

#ifndef OPD_COVERING_HPP_
#define OPD_COVERING_HPP_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opd/cost.hpp"
#include "opd/rational.hpp"

namespace opd {

struct CoveringInstance {
  std::size_t n = 0;
  std::shared_ptr<const CostFunction> cost;
  std::vector<std::vector<double>> rounds;

  void validate() const;
};

struct CoveringConfig {
  std::optional<double> rho;                     // unset: mode formula
  std::optional<std::vector<double>> initial_L;  // unset: mode default
  double eta_factor = 1e-9;   // seed floor relative to min_i 1/max_k a_ki
  double step_rel = 1e-3;     // max relative change of any coordinate per step
  std::size_t max_steps = 5'000'000;
  double tol_feas = 1e-9;
};

struct RoundParams {
  double rho = 1.0;
  double eta = 0.0;  // 0 disables seeding
  double step_rel = 1e-3;
  std::size_t max_steps = 5'000'000;
  double tol_feas = 1e-9;
};

struct RoundRecord {
  double y = 0.0;
  double f_before = 0.0;   // f at round entry, before seeding
  double f_after = 0.0;
  double seed_cost = 0.0;  // increase of f caused by seeding
  double budget = 0.0;     // one-sided Euler error, cost units
  double slack = 0.0;      // <a_k, x> - 1 at round end
  std::size_t steps = 0;
  std::size_t free_moves = 0;
};

struct PrimalDualState {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;
  std::vector<RoundRecord> round_log;
  std::vector<std::vector<double>> x_after;  // x at the end of every round
};

PrimalDualState make_state(std::size_t n, std::span<const double> L);

void run_round(PrimalDualState& state, std::span<const double> a, const CostFunction& cost,
               const RoundParams& params);

enum class CoveringMode { kGeneral, kSharp, kHomogeneous, kGeneralPoly, kLp };

const char* mode_name(CoveringMode mode);
std::optional<CoveringMode> parse_covering_mode(const std::string& name);

struct GeneralParams {
  double rho = 0.0;
  double mu = 0.0;
  std::vector<double> U;
  double additive = 0.0;  // tau * C(L)
};

GeneralParams resolve_params_general(const CoveringInstance& instance, std::span<const double> L);

struct SharpParams {
  double rho = 0.0;
  double bound = 0.0;  // (tau/lambda)^tau
};

SharpParams resolve_params_sharp(double tau, double lambda);
SharpParams resolve_params_sharp(const CostFunction& cost);

// Which coordinate bound on z holds at termination.
enum class DualBound { kLogMu, kLambda };

struct CoveringPlan {
  CoveringMode mode = CoveringMode::kGeneral;
  std::shared_ptr<const CostFunction> original;
  std::shared_ptr<const CostFunction> run_cost;
  // f^{1+lambda} for the general-poly pipeline; its conjugate bounds ftilde*.
  std::shared_ptr<const CostFunction> comparison;
  double rho = 0.0;
  bool rho_from_formula = true;
  std::vector<double> L;
  double eta = 0.0;
  std::optional<Rational> lambda;  // surrogate / form lambda
  double lambda_bound = 0.0;       // lambda in the z <= grad/(lambda rho) bound
  double mu = 0.0;
  double tau_run = 0.0;
  double N_pow_lambda = 1.0;       // N^lambda (general-poly)
  double n_count = 0.0;            // n (homogeneous) or d (lp)
  DualBound dual_bound = DualBound::kLambda;
  double cost_at_L = 0.0;

  // Upper bound on C_f(x) given C^opt and the additive slack (seed cost +
  // integration budget, measured on run_cost).
  double guarantee(double copt, double extra) const;
  double ratio_bound() const { return guarantee(1.0, 0.0); }
  std::string bound_chain() const;
};

double default_seed_floor(const CoveringInstance& instance, double factor);
std::vector<double> default_general_L(const CoveringInstance& instance);

CoveringPlan plan_covering(const CoveringInstance& instance, CoveringMode mode,
                           const CoveringConfig& config);

PrimalDualState run_covering(const CoveringInstance& instance, const CoveringPlan& plan,
                             const CoveringConfig& config);

struct PipelineResult {
  CoveringPlan plan;
  PrimalDualState state;
};

PipelineResult run_homogeneous_pipeline(const CoveringInstance& instance,
                                        const CoveringConfig& config = {});
PipelineResult run_general_poly_pipeline(const CoveringInstance& instance,
                                         const CoveringConfig& config = {});
PipelineResult run_lp_pipeline(const CoveringInstance& instance, const CoveringConfig& config = {});

}  // namespace opd

#endif  // OPD_COVERING_HPP_
