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

#ifndef OPD_SURROGATE_HPP_
#define OPD_SURROGATE_HPP_

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "opd/cost.hpp"
#include "opd/polynomial.hpp"
#include "opd/rational.hpp"

namespace opd {

// lambda = 1/log2(count) rounded down to a fraction with denominator <= 16;
// 1 when count <= 2.
Rational default_lambda(std::size_t count);

struct LeadTermVerdict {
  bool valid = true;
  std::vector<std::size_t> missing;  // 0-based variable indices
};

// A convex homogeneous polynomial must contain x_i^tau for every variable it
// involves. Throws NotHomogeneous for inhomogeneous input.
LeadTermVerdict validate_lead_terms(const Polynomial& f);

struct HomogeneousSurrogate {
  Rational lambda;
  std::vector<double> alpha;
  Polynomial fhat;
};

// fhat(x) = sum_d c_d alpha^{lambda d} x^{(1+lambda) d}, alpha_i = c_i^{1/tau}.
HomogeneousSurrogate build_fhat(const Polynomial& f, Rational lambda);

struct GeneralSurrogate {
  Rational lambda;
  Polynomial ftilde;
  std::size_t N = 0;
  Rational tau_tilde;
};

// ftilde(x) = sum_d c_d^{1+lambda} x^{(1+lambda) d}.
GeneralSurrogate build_ftilde(const Polynomial& f, Rational lambda);

struct SandwichSlack {
  double upper = 0.0;  // n^{lambda tau} fhat - f^{1+lambda}
  double lower = 0.0;  // f^{1+lambda} - fhat / (2 n^{2 tau lambda})
};

SandwichSlack sandwich_check_fhat(const Polynomial& f, const HomogeneousSurrogate& s,
                                  std::span<const double> x);

struct TildeSlack {
  double lower = 0.0;     // f^{1+lambda} - ftilde
  double upper = 0.0;     // N^lambda ftilde - f^{1+lambda}
  double gradient = 0.0;  // min_i (grad g - grad ftilde)_i,  g = f^{1+lambda}
};

TildeSlack sandwich_check_ftilde(const Polynomial& f, const GeneralSurrogate& s,
                                 std::span<const double> x);

// g(x) = f(x)^{1+lambda}, kept as a composite instead of being expanded.
class PowerOfCost final : public CostFunction {
 public:
  PowerOfCost(std::shared_ptr<const CostFunction> base, double lambda);

  std::size_t dim() const override { return base_->dim(); }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double tau() const override { return (1.0 + lambda_) * base_->tau(); }
  std::optional<double> lambda_mono() const override { return std::nullopt; }
  std::string describe() const override;

 private:
  std::shared_ptr<const CostFunction> base_;
  double lambda_;
};

// f(x) = sum_k <c_k, x>^p.
class SumOfPoweredForms final : public CostFunction {
 public:
  SumOfPoweredForms(std::vector<std::vector<double>> forms, double p);

  std::size_t dim() const override { return n_; }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double tau() const override { return p_; }
  std::optional<double> lambda_mono() const override { return std::nullopt; }
  std::string describe() const override;

  const std::vector<std::vector<double>>& forms() const { return forms_; }
  double p() const { return p_; }
  // Largest number of non-zero entries in a form.
  std::size_t sparsity() const;
  double form_value(std::size_t k, std::span<const double> x) const;

 private:
  std::vector<std::vector<double>> forms_;
  double p_;
  std::size_t n_ = 0;
};

// h(x) = sum_k <chat_k, x^{1+lambda}>^{p/(1+lambda)} with chat_ki = c_ki^{1+lambda}.
class PowerOfLinearForms final : public CostFunction {
 public:
  PowerOfLinearForms(std::vector<std::vector<double>> forms, double p, Rational lambda);

  std::size_t dim() const override { return n_; }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double tau() const override { return p_; }
  std::optional<double> lambda_mono() const override { return lambda_.to_double(); }
  std::string describe() const override;

  double p() const { return p_; }
  const Rational& lambda() const { return lambda_; }
  const std::vector<std::vector<double>>& forms() const { return forms_; }
  const std::vector<std::vector<double>>& scaled_forms() const { return chat_; }
  std::size_t sparsity() const { return sparsity_; }
  double form_value(std::size_t k, std::span<const double> x) const;

 private:
  double inner(std::size_t k, std::span<const double> x) const;

  std::vector<std::vector<double>> forms_;
  std::vector<std::vector<double>> chat_;
  double p_;
  Rational lambda_;
  std::size_t n_ = 0;
  std::size_t sparsity_ = 0;
};

PowerOfLinearForms build_lp_norm_cost(std::vector<std::vector<double>> forms, double p,
                                      Rational lambda);

struct FormSandwichSlack {
  double lower = 0.0;  // f_k - (1/(2 d^{2 lambda p}))^{1/(1+lambda)} h_k, min over k
  double upper = 0.0;  // d^{lambda p/(1+lambda)} h_k - f_k, min over k
};

FormSandwichSlack sandwich_check_lp(const PowerOfLinearForms& h, std::span<const double> x);

}  // namespace opd

#endif  // OPD_SURROGATE_HPP_
