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
#include "opd/auction.hpp"
#include "opd/error.hpp"

namespace opd {
namespace {

using testing::poly;

AuctionInstance instance(Polynomial f, std::vector<std::vector<double>> values) {
  AuctionInstance ai;
  ai.n = f.dim();
  ai.cost_star = std::move(f);
  ai.values = std::move(values);
  return ai;
}

TEST(Auction, ZeroValuesChooseEmptyBundle) {
  const AuctionRun r = run_auction(instance(poly(2, {{1.0, {2, 0}}, {1.0, {0, 2}}}), {{0, 0, 0, 0}}));
  const BuyerRecord& b = r.state.buyers[0];
  EXPECT_EQ(b.y[0], 1.0);
  EXPECT_EQ(b.u, 0.0);
  for (double z : r.state.z) EXPECT_EQ(z, 0.0);
  EXPECT_FALSE(r.state.params.resolved);
}

TEST(Auction, SingleBuyerBracket) {
  const AuctionRun r = run_auction(instance(poly(1, {{1.0, {2}}}), {{0.0, 1.0}}));
  const BuyerRecord& b = r.state.buyers[0];
  EXPECT_NEAR(b.mass, 1.0, 1e-12);
  const double z = r.state.z[0];
  const double welfare = b.y[1] * 1.0 - z * z;
  const double eR = r.state.params.epsilon * b.R;
  EXPECT_GE(welfare, 3.0 / 16.0 - eR - 1e-6);
  EXPECT_LE(welfare, 0.25);
}

TEST(Auction, SecondIdenticalBuyerGetsLess) {
  const AuctionRun r = run_auction(instance(poly(1, {{1.0, {2}}}), {{0.0, 1.0}, {0.0, 1.0}}));
  EXPECT_LT(r.state.buyers[1].y[1], r.state.buyers[0].y[1]);
  EXPECT_LT(r.state.buyers[1].u, r.state.buyers[0].u);
  EXPECT_GT(r.state.x_after[0][0], 0.0);
}

TEST(Auction, EpsilonDelta) {
  const Polynomial f = poly(1, {{1.0, {2}}});
  const EpsilonDelta e = compute_epsilon_delta(f, std::vector<double>{0.0, 1.0}, 2.0);
  ASSERT_TRUE(e.resolved);
  // Hessian 2 everywhere; R0 = min(1, 1/(2*2)); inf f*(z)/|z| on |z| = R0 is R0.
  EXPECT_DOUBLE_EQ(e.lipschitz, 2.0);
  EXPECT_DOUBLE_EQ(e.R0, 0.25);
  EXPECT_NEAR(e.epsilon, 0.025, 1e-9);
  EXPECT_NEAR(e.delta, 0.025 / 4.0, 1e-9);
  EXPECT_FALSE(compute_epsilon_delta(f, std::vector<double>{0.0, 0.0}, 2.0).resolved);
}

TEST(Auction, PrepareShiftsValues) {
  const AuctionPrepared p = prepare_auction(
      instance(poly(2, {{0.25, {1, 0}}, {1.0, {2, 0}}, {1.0, {0, 2}}}), {{0.5, 1.0, 1.0, 2.0}}));
  EXPECT_DOUBLE_EQ(p.shift[0], 0.5);
  EXPECT_DOUBLE_EQ(p.values[0][0], 0.0);
  EXPECT_DOUBLE_EQ(p.values[0][1], 0.25);  // 1 - 0.5 - 0.25
  EXPECT_DOUBLE_EQ(p.values[0][2], 0.5);
  EXPECT_DOUBLE_EQ(p.values[0][3], 1.25);
}

TEST(Auction, PurelyLinearWithSurplusIsUnbounded) {
  EXPECT_THROW(run_auction(instance(poly(1, {{0.25, {1}}}), {{0.0, 1.0}})), Unbounded);
}

TEST(Auction, SubsetSums) {
  std::vector<double> out;
  subset_sums(std::vector<double>{1.0, 2.0, 4.0}, out);
  ASSERT_EQ(out.size(), 8u);
  for (std::size_t S = 0; S < 8; ++S) EXPECT_EQ(out[S], static_cast<double>(S));
}

}  // namespace
}  // namespace opd
