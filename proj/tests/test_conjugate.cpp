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
#include "opd/conjugate.hpp"
#include "opd/surrogate.hpp"
#include "oracles.hpp"

namespace opd {
namespace {

using testing::poly;

TEST(Conjugate, CubicClosedForm) {
  const Polynomial f = poly(1, {{1.0 / 3.0, {3}}});
  ConjugateOracle conj(f);
  const ConjugateValue v = conj(std::vector<double>{4.0});
  EXPECT_FALSE(v.infinite);
  EXPECT_NEAR(v.value, 16.0 / 3.0, 1e-10);
  EXPECT_NEAR(v.maximizer[0], 2.0, 1e-8);
}

TEST(Conjugate, ZeroAtOrigin) {
  const Polynomial f = poly(2, {{1.0, {2, 0}}, {1.0, {1, 1}}, {2.0, {0, 3}}});
  EXPECT_EQ(ConjugateOracle(f)(std::vector<double>{0.0, 0.0}).value, 0.0);
}

TEST(Conjugate, SquaredSumIsMaxOfQuarterSquares) {
  const Polynomial f = poly(2, {{1.0, {2, 0}}, {2.0, {1, 1}}, {1.0, {0, 2}}});
  EXPECT_NEAR(ConjugateOracle(f)(std::vector<double>{1.0, 2.0}).value, 1.0, 1e-9);
}

TEST(Conjugate, PowerLawMatchesClosedForm) {
  for (Rational tau : {Rational(2), Rational(3), Rational(3, 2), Rational(4)}) {
    const double t = tau.to_double();
    const Polynomial f = poly(1, {{1.0 / t, {tau}}});
    ConjugateOracle conj(f);
    for (double z : {1e-2, 0.3, 1.0, 7.0, 50.0}) {
      const double ref = testing::power_conjugate(t, z);
      EXPECT_NEAR(conj(std::vector<double>{z}).value, ref, 1e-8 * ref) << "tau=" << t << " z=" << z;
    }
  }
}

TEST(Conjugate, LinearCostDiverges) {
  const Polynomial f = poly(1, {{1.0, {1}}});
  EXPECT_TRUE(ConjugateOracle(f)(std::vector<double>{2.0}).infinite);
  EXPECT_FALSE(ConjugateOracle(f)(std::vector<double>{0.5}).infinite);
}

TEST(Conjugate, GradientIdentity) {
  const Polynomial f = poly(2, {{1.0, {2, 0}}, {1.0, {0, 2}}});
  EXPECT_EQ(conjugate_of_gradient_identity_check(f, std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_LE(conjugate_of_gradient_identity_check(f, std::vector<double>{1.0, 2.0}), 1e-6);
}

// Fenchel-Young: f*(z) >= <x, z> - f(x) for every x.
TEST(Conjugate, FenchelYoungProperty) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  const Polynomial f = poly(2, {{1.0, {3, 0}}, {0.5, {1, 2}}, {1.0, {0, 3}}, {0.3, {1, 0}}});
  ConjugateOracle conj(f);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> z = {u(rng), u(rng)}, x = {u(rng), u(rng)};
    const double fz = conj(z).value;
    EXPECT_GE(fz + 1e-12, x[0] * z[0] + x[1] * z[1] - f.value(x));
  }
}

TEST(Conjugate, WorksOnComposites) {
  SumOfPoweredForms f({{1.0, 1.0}}, 2.0);
  // f = (x1 + x2)^2 as a composite must agree with the polynomial form.
  EXPECT_NEAR(ConjugateOracle(f)(std::vector<double>{1.0, 2.0}).value, 1.0, 1e-9);
}

}  // namespace
}  // namespace opd
