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

#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "opd/error.hpp"
#include "opd/polynomial.hpp"

namespace opd {
namespace {

using testing::poly;

TEST(Polynomial, Evaluates) {
  const Polynomial p = poly(2, {{1.0, {2, 0}}, {1.0, {1, 1}}});
  EXPECT_DOUBLE_EQ(p.value(std::vector<double>{1.0, 1.0}), 2.0);
  EXPECT_DOUBLE_EQ(p.value(std::vector<double>{0.0, 0.0}), 0.0);
  const Polynomial c = poly(1, {{1.0 / 3.0, {3}}});
  EXPECT_NEAR(c.value(std::vector<double>{2.0}), 8.0 / 3.0, 1e-15);
}

TEST(Polynomial, Gradient) {
  const Polynomial p = poly(2, {{1.0, {2, 0}}, {1.0, {1, 1}}});
  const auto g = p.grad(std::vector<double>{1.0, 2.0});
  EXPECT_DOUBLE_EQ(g[0], 4.0);
  EXPECT_DOUBLE_EQ(g[1], 1.0);
  const Polynomial c = poly(1, {{1.0 / 3.0, {3}}});
  EXPECT_NEAR(c.grad(std::vector<double>{2.0})[0], 4.0, 1e-15);
  const Polynomial q = poly(2, {{1.0, {2, 0}}, {3.0, {1, 2}}});
  const auto z = q.grad(std::vector<double>{0.0, 0.0});
  EXPECT_EQ(z[0], 0.0);
  EXPECT_EQ(z[1], 0.0);
}

TEST(Polynomial, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  const Polynomial p = poly(3, {{1.5, {2, 0, 0}}, {0.5, {1, 1, 1}}, {2.0, {0, Rational(5, 2), 0}},
                                {1.0, {0, 1, Rational(3, 2)}}, {0.25, {0, 0, 4}}});
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x = {u(rng), u(rng), u(rng)};
    const auto g = p.grad(x);
    const auto fd = testing::numeric_gradient(p, x);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(g[i], fd[i], 1e-6 * std::max(1.0, std::abs(g[i])));
  }
}

TEST(Polynomial, CanonicalForm) {
  const Polynomial p = poly(2, {{1.0, {0, 2}}, {2.0, {2, 0}}, {3.0, {0, 2}}, {0.0, {1, 1}}});
  ASSERT_EQ(p.size(), 2u);
  const Polynomial q = poly(2, {{2.0, {2, 0}}, {4.0, {0, 2}}});
  ASSERT_EQ(q.size(), 2u);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_EQ(p.monomials()[j].coeff, q.monomials()[j].coeff);
    EXPECT_EQ(p.monomials()[j].degrees, q.monomials()[j].degrees);
  }
}

TEST(Polynomial, RejectsInvalidInput) {
  EXPECT_THROW(poly(1, {{-1.0, {2}}}), InvalidPolynomial);
  EXPECT_THROW(poly(1, {{1.0, {Rational(1, 2)}}}), InvalidPolynomial);
  EXPECT_THROW(poly(1, {{1.0, {0}}}), InvalidPolynomial);
  EXPECT_THROW(poly(2, {{1.0, {2}}}), DimensionMismatch);
  const Polynomial p = poly(2, {{1.0, {2, 0}}});
  EXPECT_THROW(p.value(std::vector<double>{1.0}), DimensionMismatch);
}

TEST(Polynomial, Profile) {
  const auto a = profile(poly(2, {{1.0, {4, 0}}, {1.0, {0, 4}}}));
  EXPECT_EQ(a.tau, Rational(4));
  ASSERT_TRUE(a.lambda_mono.has_value());
  EXPECT_EQ(*a.lambda_mono, Rational(3));
  EXPECT_TRUE(a.is_homogeneous);

  const auto b = profile(poly(2, {{1.0, {2, 0}}, {1.0, {1, 1}}}));
  EXPECT_EQ(b.tau, Rational(2));
  EXPECT_FALSE(b.lambda_mono.has_value());
  EXPECT_TRUE(b.is_homogeneous);

  const auto c = profile(poly(1, {{1.0, {1}}, {1.0, {2}}}));
  EXPECT_EQ(c.tau, Rational(2));
  EXPECT_EQ(c.min_degree, Rational(1));
  EXPECT_FALSE(c.lambda_mono.has_value());
  EXPECT_FALSE(c.is_homogeneous);
}

TEST(Polynomial, ConvexityCheck) {
  const auto bad = check_convexity(poly(2, {{1.0, {1, 1}}}), 20, 1);
  EXPECT_FALSE(bad.convex);
  EXPECT_EQ(bad.witness.size(), 2u);
  EXPECT_TRUE(check_convexity(poly(2, {{1.0, {2, 0}}, {1.0, {0, 2}}}), 50, 1).convex);
  EXPECT_TRUE(check_convexity(poly(2, {{1.0, {2, 0}}, {1.0, {1, 1}}, {1.0, {0, 2}}}), 50, 1).convex);
}

TEST(Polynomial, HessianIndefiniteAtOne) {
  const auto h = poly(2, {{1.0, {1, 1}}}).hessian(std::vector<double>{1.0, 1.0});
  EXPECT_DOUBLE_EQ(h[0], 0.0);
  EXPECT_DOUBLE_EQ(h[1], 1.0);
  EXPECT_DOUBLE_EQ(h[2], 1.0);
  EXPECT_DOUBLE_EQ(h[3], 0.0);
}

}  // namespace
}  // namespace opd
