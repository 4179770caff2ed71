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

// Online convex packing: max sum_k y_k - f*(A^T y) with requests a_k arriving
// online. Each round grows y_k while <a_k, grad f*(rho z)> < 1.

#ifndef OPD_PACKING_HPP_
#define OPD_PACKING_HPP_

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "opd/polynomial.hpp"

namespace opd {

struct PackingInstance {
  std::size_t n = 0;
  Polynomial cost_star;
  std::vector<std::vector<double>> rounds;

  void validate() const;
};

struct PackingPreprocessed {
  std::vector<double> c;   // grad f*(0), the linear part
  Polynomial fhat_star;    // the remaining terms (degree > 1)
  std::vector<double> b;   // 1 - <a_k, c>
  std::vector<bool> skip;  // b_k <= 0
  std::vector<std::vector<double>> scaled;  // a_k / b_k (empty when skipped)
  Rational lambda;         // min degree of fhat_star
  double tau = 0.0;        // max degree of fhat_star
};

// Splits f* = <c, z> + fhat*(z). Throws Unbounded when f* is purely linear and
// some request has b_k > 0.
PackingPreprocessed preprocess_linear(const PackingInstance& instance);

struct PackingState {
  std::vector<double> w;  // scaled duals (w_k = b_k y_k)
  std::vector<double> y;
  std::vector<double> z;  // A^T y
  std::vector<double> x;  // grad fhat*(rho z)
  std::vector<std::vector<double>> x_after;
  std::vector<std::vector<double>> z_after;
  // min over sampled growth points of dP/dw_k - (1 - rho^{1-lambda}).
  double growth_margin = std::numeric_limits<double>::infinity();
};

// Root of <a, grad fhat*(rho (z + t a))> = 1 in t (0 if already >= 1).
// Updates z, x, w and returns w_k.
double run_packing_round(PackingState& state, std::span<const double> a_scaled,
                         const Polynomial& fhat_star, double rho, double lambda);

struct PackingRun {
  PackingPreprocessed pre;
  PackingState state;
  double rho = 0.0;
  bool rho_from_formula = true;
  double certificate = 0.0;  // (tau-1) rho^lambda / (rho^{lambda-1} - 1)
};

double packing_rho(const Rational& lambda);
double packing_certificate(double tau, double lambda, double rho);

PackingRun run_packing(const PackingInstance& instance, std::optional<double> rho = std::nullopt);

// f(x) for x = grad fhat*(w): <w, x> - fhat*(w).
double dual_cost_at(const Polynomial& fhat_star, std::span<const double> w);

}  // namespace opd

#endif  // OPD_PACKING_HPP_
