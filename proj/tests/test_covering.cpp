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

#include "helpers.hpp"
#include "opd/covering.hpp"
#include "opd/error.hpp"
#include "opd/surrogate.hpp"

namespace opd {
namespace {

using testing::poly;

CoveringInstance instance(Polynomial f, std::vector<std::vector<double>> rounds) {
  CoveringInstance ci;
  ci.n = f.dim();
  ci.cost = std::make_shared<Polynomial>(std::move(f));
  ci.rounds = std::move(rounds);
  return ci;
}

// dy = grad f(x) / (rho a x) dx = 2 dx for f = x^2, from x = 0.01 to 1.
TEST(Covering, SingleRoundIntegratesAnalytically) {
  const Polynomial f = poly(1, {{1.0, {2}}});
  PrimalDualState st = make_state(1, std::vector<double>{0.01});
  RoundParams rp;
  rp.rho = 1.0;
  run_round(st, std::vector<double>{1.0}, f, rp);
  EXPECT_NEAR(st.x[0], 1.0, 1e-9);
  EXPECT_NEAR(st.y[0], 1.98, 1e-9 * 1.98 + st.round_log[0].budget);
  EXPECT_GE(st.y[0], 0.9999);
}

TEST(Covering, SatisfiedRoundIsNoOp) {
  const Polynomial f = poly(1, {{1.0, {2}}});
  PrimalDualState st = make_state(1, std::vector<double>{2.0});
  run_round(st, std::vector<double>{1.0}, f, RoundParams{});
  EXPECT_EQ(st.y[0], 0.0);
  EXPECT_EQ(st.x[0], 2.0);
}

TEST(Covering, RepeatedRoundIsNoOp) {
  CoveringInstance ci = instance(poly(2, {{1.0, {2, 0}}, {1.0, {0, 2}}}), {{1.0, 1.0}, {1.0, 1.0}});
  CoveringConfig cfg;
  CoveringPlan plan = plan_covering(ci, CoveringMode::kSharp, cfg);
  PrimalDualState st = run_covering(ci, plan, cfg);
  EXPECT_GT(st.y[0], 0.0);
  EXPECT_EQ(st.y[1], 0.0);
}

TEST(Covering, GeneralRho) {
  // U = 1 and L = 1/e give ln mu = 1, so rho = 2^1 * 1^2.
  CoveringInstance ci = instance(poly(1, {{1.0, {2}}}), {{1.0}});
  const double L = std::exp(-1.0);
  EXPECT_NEAR(resolve_params_general(ci, std::vector<double>{L}).rho, 2.0, 1e-12);
  EXPECT_THROW(resolve_params_general(ci, std::vector<double>{1.0}), DegenerateParameters);
}

TEST(Covering, SharpRho) {
  EXPECT_DOUBLE_EQ(resolve_params_sharp(4.0, 1.0).rho, 64.0);
  EXPECT_DOUBLE_EQ(resolve_params_sharp(2.0, 1.0).rho, 2.0);
  EXPECT_DOUBLE_EQ(resolve_params_sharp(2.0, 1.0).bound, 4.0);
  EXPECT_NEAR(resolve_params_sharp(3.0, 3.0).rho, 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(resolve_params_sharp(3.0, 3.0).bound, 1.0);
  EXPECT_THROW(resolve_params_sharp(2.0, 0.0), DegenerateParameters);
}

TEST(Covering, ModesProduceFeasibleMonotoneRuns) {
  const std::vector<std::vector<double>> rows = {{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}, {1.0, 0.2}};
  struct Case {
    CoveringMode mode;
    Polynomial f;
  };
  std::vector<Case> cases = {
      {CoveringMode::kGeneral, poly(2, {{1.0, {2, 0}}, {1.0, {1, 1}}, {1.0, {0, 2}}})},
      {CoveringMode::kSharp, poly(2, {{1.0, {4, 0}}, {1.0, {0, 4}}})},
      {CoveringMode::kHomogeneous, poly(2, {{1.0, {2, 0}}, {1.0, {1, 1}}, {1.0, {0, 2}}})},
      {CoveringMode::kGeneralPoly, poly(2, {{1.0, {1, 0}}, {1.0, {2, 0}}, {1.0, {0, 2}}})},
  };
  for (auto& c : cases) {
    CoveringInstance ci = instance(c.f, rows);
    CoveringConfig cfg;
    CoveringPlan plan = plan_covering(ci, c.mode, cfg);
    PrimalDualState st = run_covering(ci, plan, cfg);
    std::vector<double> prev(2, 0.0);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& x = st.x_after[k];
      for (std::size_t j = 0; j <= k; ++j) {
        EXPECT_GE(rows[j][0] * x[0] + rows[j][1] * x[1], 1.0 - 1e-9) << mode_name(c.mode);
      }
      for (int i = 0; i < 2; ++i) EXPECT_GE(x[i], prev[i]);
      prev = x;
    }
  }
}

TEST(Covering, LpModeUsesFormSurrogate) {
  CoveringInstance ci;
  ci.n = 3;
  ci.cost = std::make_shared<SumOfPoweredForms>(std::vector<std::vector<double>>{{1.0, 1.0, 0.0}, {0.0, 1.0, 1.0}},
                                                 2.0);
  ci.rounds = {{1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}};
  CoveringConfig cfg;
  CoveringPlan plan = plan_covering(ci, CoveringMode::kLp, cfg);
  EXPECT_NE(dynamic_cast<const PowerOfLinearForms*>(plan.run_cost.get()), nullptr);
  PrimalDualState st = run_covering(ci, plan, cfg);
  EXPECT_GE(st.x[0], 1.0 - 1e-9);
  EXPECT_GE(st.x[2], 1.0 - 1e-9);
}

TEST(Covering, SharpRequiresLambda) {
  CoveringInstance ci = instance(poly(2, {{1.0, {2, 0}}, {1.0, {1, 1}}}), {{1.0, 1.0}});
  EXPECT_THROW(plan_covering(ci, CoveringMode::kSharp, CoveringConfig{}), Error);
}

TEST(Covering, ModeNames) {
  for (auto m : {CoveringMode::kGeneral, CoveringMode::kSharp, CoveringMode::kHomogeneous,
                 CoveringMode::kGeneralPoly, CoveringMode::kLp}) {
    EXPECT_EQ(parse_covering_mode(mode_name(m)), m);
  }
  EXPECT_FALSE(parse_covering_mode("bogus").has_value());
}

}  // namespace
}  // namespace opd
