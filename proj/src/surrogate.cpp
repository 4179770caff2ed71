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

#include "opd/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opd/error.hpp"

namespace opd {
namespace {

std::vector<Rational> scale_degrees(const std::vector<Rational>& d, const Rational& factor) {
  std::vector<Rational> out;
  out.reserve(d.size());
  for (const Rational& e : d) out.push_back(e * factor);
  return out;
}

std::size_t check_forms(const std::vector<std::vector<double>>& forms) {
  if (forms.empty()) throw InvalidInstance("at least one linear form is required");
  const std::size_t n = forms.front().size();
  for (const auto& c : forms) {
    if (c.size() != n) throw DimensionMismatch("linear forms differ in length");
    bool nonzero = false;
    for (double v : c) {
      if (!std::isfinite(v) || v < 0.0) throw InvalidInstance("form entries must be non-negative");
      nonzero = nonzero || v > 0.0;
    }
    if (!nonzero) throw InvalidInstance("zero linear form");
  }
  return n;
}

double dot(const std::vector<double>& c, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * x[i];
  return s;
}

}  // namespace

Rational default_lambda(std::size_t count) {
  if (count <= 2) return Rational(1);
  return Rational::floor_approx(1.0 / std::log2(static_cast<double>(count)), 16);
}

LeadTermVerdict validate_lead_terms(const Polynomial& f) {
  const ConvexityProfile& prof = f.profile();
  if (!prof.is_homogeneous) throw NotHomogeneous("lead-term check requires a homogeneous polynomial");
  LeadTermVerdict verdict;
  for (std::size_t i = 0; i < f.dim(); ++i) {
    bool appears = false;
    bool lead = false;
    for (const Monomial& m : f.monomials()) {
      if (m.degrees[i].is_zero()) continue;
      appears = true;
      if (m.degrees[i] == prof.tau && m.coeff > 0.0) lead = true;
    }
    if (appears && !lead) verdict.missing.push_back(i);
  }
  verdict.valid = verdict.missing.empty();
  return verdict;
}

HomogeneousSurrogate build_fhat(const Polynomial& f, Rational lambda) {
  if (lambda <= Rational(0) || lambda > Rational(1)) throw Error("lambda must lie in (0, 1]");
  LeadTermVerdict lead = validate_lead_terms(f);
  if (!lead.valid) throw MissingLeadTerm("polynomial lacks pure x_i^tau terms");
  const Rational tau = f.profile().tau;
  const double tau_d = tau.to_double();
  const double lam = lambda.to_double();
  HomogeneousSurrogate s;
  s.lambda = lambda;
  s.alpha.assign(f.dim(), 1.0);
  for (const Monomial& m : f.monomials()) {
    for (std::size_t i = 0; i < f.dim(); ++i) {
      if (m.degrees[i] == tau) s.alpha[i] = std::pow(m.coeff, 1.0 / tau_d);
    }
  }
  const Rational grow = Rational(1) + lambda;
  std::vector<Monomial> out;
  for (const Monomial& m : f.monomials()) {
    double coeff = m.coeff;
    for (std::size_t i = 0; i < f.dim(); ++i) {
      if (!m.degrees[i].is_zero()) coeff *= std::pow(s.alpha[i], lam * m.degrees[i].to_double());
    }
    out.push_back({coeff, scale_degrees(m.degrees, grow)});
  }
  s.fhat = Polynomial(f.dim(), std::move(out));
  return s;
}

GeneralSurrogate build_ftilde(const Polynomial& f, Rational lambda) {
  if (lambda <= Rational(0) || lambda > Rational(1)) throw Error("lambda must lie in (0, 1]");
  const Rational grow = Rational(1) + lambda;
  std::vector<Monomial> out;
  for (const Monomial& m : f.monomials()) {
    out.push_back({std::pow(m.coeff, grow.to_double()), scale_degrees(m.degrees, grow)});
  }
  GeneralSurrogate s;
  s.lambda = lambda;
  s.N = f.size();
  s.tau_tilde = f.profile().tau * grow;
  s.ftilde = Polynomial(f.dim(), std::move(out));
  return s;
}

SandwichSlack sandwich_check_fhat(const Polynomial& f, const HomogeneousSurrogate& s,
                                  std::span<const double> x) {
  const double lam = s.lambda.to_double();
  const double tau = f.tau();
  const double n = static_cast<double>(f.dim());
  const double g = std::pow(f.value(x), 1.0 + lam);
  const double fh = s.fhat.value(x);
  SandwichSlack out;
  out.upper = std::pow(n, lam * tau) * fh - g;
  out.lower = g - fh / (2.0 * std::pow(n, 2.0 * tau * lam));
  return out;
}

TildeSlack sandwich_check_ftilde(const Polynomial& f, const GeneralSurrogate& s,
                                 std::span<const double> x) {
  const double lam = s.lambda.to_double();
  const double fx = f.value(x);
  const double g = std::pow(fx, 1.0 + lam);
  const double ft = s.ftilde.value(x);
  TildeSlack out;
  out.lower = g - ft;
  out.upper = std::pow(static_cast<double>(s.N), lam) * ft - g;
  std::vector<double> gf = f.grad(x);
  std::vector<double> gt = s.ftilde.grad(x);
  const double factor = (1.0 + lam) * std::pow(fx, lam);
  out.gradient = 0.0;
  for (std::size_t i = 0; i < gf.size(); ++i) {
    double slack = factor * gf[i] - gt[i];
    if (i == 0 || slack < out.gradient) out.gradient = slack;
  }
  return out;
}

PowerOfCost::PowerOfCost(std::shared_ptr<const CostFunction> base, double lambda)
    : base_(std::move(base)), lambda_(lambda) {}

double PowerOfCost::value(std::span<const double> x) const {
  return std::pow(base_->value(x), 1.0 + lambda_);
}

void PowerOfCost::gradient(std::span<const double> x, std::span<double> out) const {
  base_->gradient(x, out);
  const double factor = (1.0 + lambda_) * std::pow(base_->value(x), lambda_);
  for (double& v : out) v *= factor;
}

std::string PowerOfCost::describe() const {
  std::ostringstream os;
  os << "(" << base_->describe() << ")^" << (1.0 + lambda_);
  return os.str();
}

SumOfPoweredForms::SumOfPoweredForms(std::vector<std::vector<double>> forms, double p)
    : forms_(std::move(forms)), p_(p) {
  n_ = check_forms(forms_);
  if (!(p_ >= 1.0)) throw InvalidInstance("form power must be >= 1");
}

std::size_t SumOfPoweredForms::sparsity() const {
  std::size_t d = 0;
  for (const auto& c : forms_) {
    d = std::max<std::size_t>(d, std::count_if(c.begin(), c.end(), [](double v) { return v > 0.0; }));
  }
  return d;
}

double SumOfPoweredForms::form_value(std::size_t k, std::span<const double> x) const {
  return std::pow(dot(forms_[k], x), p_);
}

double SumOfPoweredForms::value(std::span<const double> x) const {
  if (x.size() != n_) throw DimensionMismatch("point has wrong dimension");
  double s = 0.0;
  for (std::size_t k = 0; k < forms_.size(); ++k) s += form_value(k, x);
  return s;
}

void SumOfPoweredForms::gradient(std::span<const double> x, std::span<double> out) const {
  if (x.size() != n_ || out.size() != n_) throw DimensionMismatch("point has wrong dimension");
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& c : forms_) {
    double w = p_ * std::pow(dot(c, x), p_ - 1.0);
    for (std::size_t i = 0; i < n_; ++i) out[i] += w * c[i];
  }
}

std::string SumOfPoweredForms::describe() const {
  std::ostringstream os;
  os << "sum_k <c_k,x>^" << p_ << " (" << forms_.size() << " forms)";
  return os.str();
}

PowerOfLinearForms::PowerOfLinearForms(std::vector<std::vector<double>> forms, double p,
                                       Rational lambda)
    : forms_(std::move(forms)), p_(p), lambda_(lambda) {
  n_ = check_forms(forms_);
  if (!(p_ >= 2.0)) throw InvalidInstance("form power must be >= 2");
  if (lambda_ <= Rational(0) || lambda_ > Rational(1)) throw Error("lambda must lie in (0, 1]");
  const double grow = 1.0 + lambda_.to_double();
  for (const auto& c : forms_) {
    std::vector<double> ch(n_);
    std::size_t nz = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      ch[i] = c[i] > 0.0 ? std::pow(c[i], grow) : 0.0;
      nz += c[i] > 0.0 ? 1 : 0;
    }
    sparsity_ = std::max(sparsity_, nz);
    chat_.push_back(std::move(ch));
  }
}

double PowerOfLinearForms::inner(std::size_t k, std::span<const double> x) const {
  const double grow = 1.0 + lambda_.to_double();
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    if (chat_[k][i] > 0.0) s += chat_[k][i] * std::pow(x[i], grow);
  }
  return s;
}

double PowerOfLinearForms::form_value(std::size_t k, std::span<const double> x) const {
  return std::pow(inner(k, x), p_ / (1.0 + lambda_.to_double()));
}

double PowerOfLinearForms::value(std::span<const double> x) const {
  if (x.size() != n_) throw DimensionMismatch("point has wrong dimension");
  double s = 0.0;
  for (std::size_t k = 0; k < chat_.size(); ++k) s += form_value(k, x);
  return s;
}

void PowerOfLinearForms::gradient(std::span<const double> x, std::span<double> out) const {
  if (x.size() != n_ || out.size() != n_) throw DimensionMismatch("point has wrong dimension");
  const double lam = lambda_.to_double();
  const double expo = p_ / (1.0 + lam) - 1.0;
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < chat_.size(); ++k) {
    double w = p_ * std::pow(inner(k, x), expo);
    for (std::size_t i = 0; i < n_; ++i) {
      if (chat_[k][i] > 0.0) out[i] += w * chat_[k][i] * std::pow(x[i], lam);
    }
  }
}

std::string PowerOfLinearForms::describe() const {
  std::ostringstream os;
  os << "sum_k <chat_k,x^(1+" << lambda_.to_string() << ")>^(" << p_ << "/(1+"
     << lambda_.to_string() << ")) (" << chat_.size() << " forms)";
  return os.str();
}

PowerOfLinearForms build_lp_norm_cost(std::vector<std::vector<double>> forms, double p,
                                      Rational lambda) {
  return PowerOfLinearForms(std::move(forms), p, lambda);
}

FormSandwichSlack sandwich_check_lp(const PowerOfLinearForms& h, std::span<const double> x) {
  const double lam = h.lambda().to_double();
  const double p = h.p();
  const double d = static_cast<double>(h.sparsity());
  const double low = std::pow(1.0 / (2.0 * std::pow(d, 2.0 * lam * p)), 1.0 / (1.0 + lam));
  const double high = std::pow(d, lam * p / (1.0 + lam));
  FormSandwichSlack out;
  for (std::size_t k = 0; k < h.forms().size(); ++k) {
    double fk = std::pow(dot(h.forms()[k], x), p);
    double hk = h.form_value(k, x);
    double lo = fk - low * hk;
    double hi = high * hk - fk;
    if (k == 0 || lo < out.lower) out.lower = lo;
    if (k == 0 || hi < out.upper) out.upper = hi;
  }
  return out;
}

}  // namespace opd
