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

#include "opd/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "opd/error.hpp"

namespace opd {
namespace {

constexpr std::int64_t kMaxDenominator = 1024;
constexpr std::size_t kMaxTableSize = std::size_t{1} << 16;

bool degree_less(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

Rational Monomial::total_degree() const {
  Rational sum;
  for (const Rational& d : degrees) sum += d;
  return sum;
}

Polynomial::Polynomial(std::size_t n, std::vector<Monomial> monomials) : n_(n) {
  for (const Monomial& m : monomials) {
    if (m.degrees.size() != n) {
      throw DimensionMismatch("monomial has " + std::to_string(m.degrees.size()) +
                              " degrees, expected " + std::to_string(n));
    }
    if (!std::isfinite(m.coeff) || m.coeff < 0.0) {
      throw InvalidPolynomial("coefficients must be finite and non-negative");
    }
    for (const Rational& d : m.degrees) {
      if (d < Rational(0)) throw InvalidPolynomial("negative degree");
      if (d > Rational(0) && d < Rational(1)) {
        throw InvalidPolynomial("fractional degree " + d.to_string() + " in (0,1)");
      }
    }
  }
  std::stable_sort(monomials.begin(), monomials.end(),
                   [](const Monomial& a, const Monomial& b) { return degree_less(a.degrees, b.degrees); });
  for (Monomial& m : monomials) {
    if (!monomials_.empty() && monomials_.back().degrees == m.degrees) {
      monomials_.back().coeff += m.coeff;
    } else {
      monomials_.push_back(std::move(m));
    }
  }
  std::erase_if(monomials_, [](const Monomial& m) { return m.coeff == 0.0; });
  for (const Monomial& m : monomials_) {
    if (m.total_degree().is_zero()) throw InvalidPolynomial("constant term must be zero");
  }
  profile_ = opd::profile(*this);
  build_plan();
}

ConvexityProfile profile(const Polynomial& p) {
  ConvexityProfile out;
  const auto& mons = p.monomials();
  if (mons.empty()) return out;
  out.tau = mons.front().total_degree();
  out.min_degree = out.tau;
  for (const Monomial& m : mons) {
    Rational t = m.total_degree();
    if (t > out.tau) out.tau = t;
    if (t < out.min_degree) out.min_degree = t;
  }
  out.is_homogeneous = out.tau == out.min_degree;
  std::optional<Rational> lam;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    for (const Monomial& m : mons) {
      if (m.degrees[i].is_zero()) continue;
      Rational cand = m.degrees[i] - Rational(1);
      if (!lam || cand < *lam) lam = cand;
    }
  }
  if (lam && *lam > Rational(0)) out.lambda_mono = lam;
  return out;
}

std::optional<double> Polynomial::lambda_mono() const {
  if (!profile_.lambda_mono) return std::nullopt;
  return profile_.lambda_mono->to_double();
}

void Polynomial::build_plan() {
  const std::size_t count = monomials_.size();
  std::int64_t q = 1;
  for (const Monomial& m : monomials_) {
    for (const Rational& d : m.degrees) {
      q = lcm_checked(q, d.den());
      if (q > kMaxDenominator) return;
    }
  }
  denom_ = q;
  std::vector<std::int64_t> top(n_, 0);
  used_.assign(n_, {0});
  for (const Monomial& m : monomials_) {
    for (std::size_t l = 0; l < n_; ++l) {
      std::int64_t e = m.degrees[l].num() * (q / m.degrees[l].den());
      top[l] = std::max(top[l], e);
      if (e > 0) {
        used_[l].push_back(static_cast<std::int32_t>(e));
        used_[l].push_back(static_cast<std::int32_t>(e - q));
      }
    }
  }
  std::size_t size = 0;
  offset_.resize(n_);
  for (std::size_t l = 0; l < n_; ++l) {
    offset_[l] = static_cast<std::int32_t>(size);
    size += static_cast<std::size_t>(top[l]) + 1;
    if (size > kMaxTableSize) return;
    std::sort(used_[l].begin(), used_[l].end());
    used_[l].erase(std::unique(used_[l].begin(), used_[l].end()), used_[l].end());
  }
  table_size_ = size;
  coeff_.resize(count);
  idx_.resize(n_ * count);
  didx_.resize(n_ * count);
  dscale_.resize(n_ * count);
  for (std::size_t j = 0; j < count; ++j) {
    const Monomial& m = monomials_[j];
    coeff_[j] = m.coeff;
    for (std::size_t l = 0; l < n_; ++l) {
      auto e = static_cast<std::int32_t>(m.degrees[l].num() * (q / m.degrees[l].den()));
      idx_[l * count + j] = offset_[l] + e;
      didx_[l * count + j] = e > 0 ? offset_[l] + e - static_cast<std::int32_t>(q) : -1;
      dscale_[l * count + j] = m.degrees[l].to_double();
    }
  }
  tabulated_ = true;
}

void Polynomial::check_dim(std::size_t got) const {
  if (got != n_) {
    throw DimensionMismatch("point has " + std::to_string(got) + " coordinates, expected " +
                            std::to_string(n_));
  }
}

void Polynomial::fill_table(std::span<const double> x, std::vector<double>& table) const {
  table.resize(table_size_);
  for (std::size_t l = 0; l < n_; ++l) {
    double* t = table.data() + offset_[l];
    if (denom_ == 1) {
      const std::int32_t top = used_[l].back();
      t[0] = 1.0;
      for (std::int32_t k = 1; k <= top; ++k) t[k] = t[k - 1] * x[l];
    } else {
      const double q = static_cast<double>(denom_);
      for (std::int32_t k : used_[l]) t[k] = k == 0 ? 1.0 : std::pow(x[l], k / q);
    }
  }
}

double Polynomial::direct_term(std::size_t j, std::span<const double> x) const {
  const Monomial& m = monomials_[j];
  double prod = m.coeff;
  for (std::size_t l = 0; l < n_; ++l) {
    if (!m.degrees[l].is_zero()) prod *= std::pow(x[l], m.degrees[l].to_double());
  }
  return prod;
}

double Polynomial::value(std::span<const double> x) const {
  return value(x, kernels::active_isa());
}

double Polynomial::value(std::span<const double> x, kernels::Isa isa) const {
  check_dim(x.size());
  const std::size_t count = monomials_.size();
  double sum = 0.0;
  if (!tabulated_) {
    for (std::size_t j = 0; j < count; ++j) sum += direct_term(j, x);
    return sum;
  }
  thread_local std::vector<double> table;
  thread_local std::vector<double> terms;
  fill_table(x, table);
  terms.resize(count);
  kernels::monomial_terms({coeff_.data(), idx_.data(), count, n_}, table.data(), terms.data(), isa);
  for (std::size_t j = 0; j < count; ++j) sum += terms[j];
  return sum;
}

void Polynomial::gradient(std::span<const double> x, std::span<double> out) const {
  gradient(x, out, kernels::active_isa());
}

void Polynomial::gradient(std::span<const double> x, std::span<double> out, kernels::Isa isa) const {
  check_dim(x.size());
  check_dim(out.size());
  const std::size_t count = monomials_.size();
  if (!tabulated_) {
    for (std::size_t i = 0; i < n_; ++i) {
      double sum = 0.0;
      for (const Monomial& m : monomials_) {
        if (m.degrees[i].is_zero()) continue;
        double prod = m.coeff * m.degrees[i].to_double();
        for (std::size_t l = 0; l < n_; ++l) {
          double d = m.degrees[l].to_double() - (l == i ? 1.0 : 0.0);
          if (d != 0.0) prod *= std::pow(x[l], d);
        }
        sum += prod;
      }
      out[i] = sum;
    }
    return;
  }
  thread_local std::vector<double> table;
  thread_local std::vector<double> terms;
  fill_table(x, table);
  terms.resize(count);
  const kernels::TermLayout layout{coeff_.data(), idx_.data(), count, n_};
  for (std::size_t i = 0; i < n_; ++i) {
    kernels::monomial_partials(layout, i, didx_.data() + i * count, dscale_.data() + i * count,
                               table.data(), terms.data(), isa);
    double sum = 0.0;
    for (std::size_t j = 0; j < count; ++j) sum += terms[j];
    out[i] = sum;
  }
}

std::vector<double> Polynomial::hessian(std::span<const double> x) const {
  check_dim(x.size());
  std::vector<double> h(n_ * n_, 0.0);
  for (const Monomial& m : monomials_) {
    for (std::size_t a = 0; a < n_; ++a) {
      double da = m.degrees[a].to_double();
      if (da == 0.0) continue;
      for (std::size_t b = a; b < n_; ++b) {
        double db = m.degrees[b].to_double();
        if (db == 0.0) continue;
        double factor = a == b ? da * (da - 1.0) : da * db;
        if (factor == 0.0) continue;
        double prod = m.coeff * factor;
        for (std::size_t l = 0; l < n_; ++l) {
          double d = m.degrees[l].to_double();
          if (l == a) d -= 1.0;
          if (l == b) d -= 1.0;
          if (d != 0.0) prod *= std::pow(x[l], d);
        }
        h[a * n_ + b] += prod;
        if (a != b) h[b * n_ + a] += prod;
      }
    }
  }
  return h;
}

std::string Polynomial::describe() const {
  if (monomials_.empty()) return "0";
  std::ostringstream os;
  os.precision(10);
  bool first = true;
  for (const Monomial& m : monomials_) {
    if (!first) os << " + ";
    first = false;
    os << m.coeff;
    for (std::size_t l = 0; l < n_; ++l) {
      if (m.degrees[l].is_zero()) continue;
      os << "*x" << (l + 1);
      if (m.degrees[l] != Rational(1)) os << "^" << m.degrees[l].to_string();
    }
  }
  return os.str();
}

ConvexityVerdict check_convexity(const Polynomial& p, std::size_t trials, std::uint64_t seed) {
  ConvexityVerdict verdict;
  const std::size_t n = p.dim();
  if (n == 0 || p.empty()) return verdict;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.01, 2.0);
  std::vector<double> x(n);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (double& v : x) v = coord(rng);
    std::vector<double> h = p.hessian(x);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> hm(
        h.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hm, Eigen::EigenvaluesOnly);
    const auto& eig = solver.eigenvalues();
    double magnitude = std::max(1.0, eig.cwiseAbs().maxCoeff());
    double lowest = eig.minCoeff();
    if (t == 0 || lowest < worst) worst = lowest;
    if (lowest < -1e-9 * magnitude) {
      verdict.convex = false;
      verdict.witness = x;
      verdict.min_eigenvalue = lowest;
      return verdict;
    }
  }
  verdict.min_eigenvalue = worst;
  return verdict;
}

}  // namespace opd
