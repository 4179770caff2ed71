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

#include "opd/error.hpp"
#include "opd/generators.hpp"
#include "opd/instance_io.hpp"
#include "opd/surrogate.hpp"
#include "opd/covering.hpp"

namespace opd {
namespace {

TEST(InstanceIo, RoundTripsEveryFamily) {
  const std::vector<std::pair<std::string, GenParams>> cases = {
      {"random-poly", {{"n", "3"}, {"tau", "3"}, {"homogeneous", "0"}}},
      {"lp-linear-forms", {{"n", "4"}, {"l", "3"}, {"d", "2"}, {"p", "2"}}},
      {"mixed-cover-pack", {{"n", "3"}, {"l", "4"}}},
      {"packing-poly", {{"n", "2"}, {"linear", "1"}}},
      {"auction-random", {{"n", "3"}, {"buyers", "2"}}},
  };
  for (const auto& [family, params] : cases) {
    const InstanceFile a = generate(family, params, 7);
    const std::string text = serialize(a);
    const InstanceFile b = parse_instance(text);
    EXPECT_EQ(serialize(b), text) << family;
    EXPECT_EQ(instance_hash(a), instance_hash(b));
  }
}

TEST(InstanceIo, RejectsMalformedInput) {
  EXPECT_THROW(parse_instance("{"), Error);
  EXPECT_THROW(parse_instance(R"({"kind":"covering","n":1})"), Error);
  EXPECT_THROW(parse_instance(R"({"kind":"nope","n":1,"cost":{"type":"polynomial","monomials":[]}})"), Error);
  EXPECT_THROW(
      parse_instance(R"({"kind":"covering","n":1,"cost":{"type":"polynomial","monomials":[{"coeff":1,"degrees":["2"]}]},"rounds":[[1,2]]})"),
      Error);
}

TEST(InstanceIo, MissingAuctionMasksAreZero) {
  const InstanceFile f = parse_instance(
      R"({"kind":"auction","n":2,"cost":{"type":"polynomial","monomials":[{"coeff":1,"degrees":["2","0"]},{"coeff":1,"degrees":["0","2"]}]},"buyers":[{"values":{"3":1.5}}]})");
  ASSERT_EQ(f.buyers.size(), 1u);
  EXPECT_EQ(f.buyers[0], (std::vector<double>{0.0, 0.0, 0.0, 1.5}));
}

TEST(Generators, Deterministic) {
  for (const auto& family : generator_families()) {
    GenParams p;
    if (family == "mixed-cover-pack") p = {{"l", "4"}};
    EXPECT_EQ(serialize(generate(family, p, 42)), serialize(generate(family, p, 42))) << family;
    EXPECT_NE(serialize(generate(family, p, 42)), serialize(generate(family, p, 43))) << family;
  }
}

TEST(Generators, LpLinearFormsExample) {
  const InstanceFile f = generate("lp-linear-forms", {{"n", "4"}, {"l", "3"}, {"d", "2"}, {"p", "2"}}, 7);
  EXPECT_EQ(f.kind, InstanceKind::kCovering);
  ASSERT_TRUE(f.forms.has_value());
  EXPECT_EQ(f.forms->p, 2.0);
  ASSERT_EQ(f.forms->forms.size(), 3u);
  for (const auto& c : f.forms->forms) {
    EXPECT_EQ(std::count_if(c.begin(), c.end(), [](double v) { return v > 0.0; }), 2);
  }
  CoveringInstance ci = to_covering(f);
  CoveringPlan plan = plan_covering(ci, CoveringMode::kLp, CoveringConfig{});
  EXPECT_NE(dynamic_cast<const PowerOfLinearForms*>(plan.run_cost.get()), nullptr);
}

TEST(Generators, RandomPolySingleTerm) {
  const InstanceFile f = generate("random-poly", {{"n", "1"}, {"N", "1"}, {"tau", "2"}}, 3);
  ASSERT_TRUE(f.polynomial.has_value());
  ASSERT_EQ(f.polynomial->size(), 1u);
  EXPECT_EQ(f.polynomial->monomials()[0].degrees[0], Rational(2));
}

TEST(Generators, MixedCoverPackUsesLogNorm) {
  const InstanceFile f = generate("mixed-cover-pack", {{"l", "4"}}, 1);
  ASSERT_TRUE(f.forms.has_value());
  EXPECT_EQ(f.forms->p, 2.0);
  EXPECT_THROW(generate("mixed-cover-pack", {{"l", "2"}}, 1), Error);
}

TEST(Generators, GeneratedPolynomialsAreConvex) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const InstanceFile f = generate("random-poly", {{"n", "3"}, {"N", "4"}, {"tau", "3"}, {"homogeneous", s % 2 ? "1" : "0"}}, s);
    EXPECT_TRUE(check_convexity(*f.polynomial, 30, s).convex);
  }
}

TEST(Generators, UnknownFamilyOrParameter) {
  EXPECT_THROW(generate("nope", {}, 1), Error);
  EXPECT_THROW(generate("random-poly", {{"n", "x"}}, 1), Error);
}

}  // namespace
}  // namespace opd
