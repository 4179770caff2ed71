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

#ifndef OPD_POLYNOMIAL_HPP_
#define OPD_POLYNOMIAL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opd/cost.hpp"
#include "opd/kernels.hpp"
#include "opd/rational.hpp"

namespace opd {

struct Monomial {
  double coeff = 0.0;
  std::vector<Rational> degrees;

  Rational total_degree() const;
};

struct ConvexityProfile {
  Rational tau;
  Rational min_degree;
  std::optional<Rational> lambda_mono;
  bool is_homogeneous = true;
};

// Sparse polynomial with non-negative coefficients, no constant term and
// every non-zero degree >= 1. Stored in canonical form: monomials sorted by
// degree vector, merged, zero coefficients dropped.
class Polynomial final : public CostFunction {
 public:
  explicit Polynomial(std::size_t n = 0, std::vector<Monomial> monomials = {});

  std::size_t dim() const override { return n_; }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double tau() const override { return profile_.tau.to_double(); }
  std::optional<double> lambda_mono() const override;
  std::string describe() const override;

  double value(std::span<const double> x, kernels::Isa isa) const;
  void gradient(std::span<const double> x, std::span<double> out, kernels::Isa isa) const;
  // Dense row-major n x n Hessian, evaluated term by term.
  std::vector<double> hessian(std::span<const double> x) const;

  const std::vector<Monomial>& monomials() const { return monomials_; }
  std::size_t size() const { return monomials_.size(); }
  bool empty() const { return monomials_.empty(); }
  const ConvexityProfile& profile() const { return profile_; }
  // True when the power-table kernels are used (bounded degree denominators).
  bool tabulated() const { return tabulated_; }

 private:
  void build_plan();
  void check_dim(std::size_t got) const;
  void fill_table(std::span<const double> x, std::vector<double>& table) const;
  double direct_term(std::size_t j, std::span<const double> x) const;

  std::size_t n_ = 0;
  std::vector<Monomial> monomials_;
  ConvexityProfile profile_;

  bool tabulated_ = false;
  std::int64_t denom_ = 1;
  std::vector<double> coeff_;
  std::vector<std::int32_t> idx_;       // variable-major slots
  std::vector<std::int32_t> didx_;      // variable-major derivative slots, -1 if absent
  std::vector<double> dscale_;          // variable-major degree factors
  std::vector<std::int32_t> offset_;    // per-variable start in the table
  std::vector<std::vector<std::int32_t>> used_;  // per-variable numerators to fill
  std::size_t table_size_ = 0;
};

ConvexityProfile profile(const Polynomial& p);

struct ConvexityVerdict {
  bool convex = true;
  std::vector<double> witness;
  double min_eigenvalue = 0.0;
};

// Samples Hessians at random points of (0, 2]^n and reports the first one with
// an eigenvalue below -1e-9 (relative to the Hessian's magnitude).
ConvexityVerdict check_convexity(const Polynomial& p, std::size_t trials, std::uint64_t seed);

}  // namespace opd

#endif  // OPD_POLYNOMIAL_HPP_
