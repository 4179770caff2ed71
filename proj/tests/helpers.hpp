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

#ifndef OPD_TESTS_HELPERS_HPP_
#define OPD_TESTS_HELPERS_HPP_

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "opd/cost.hpp"
#include "opd/polynomial.hpp"

namespace opd::testing {

inline Polynomial poly(std::size_t n, std::vector<Monomial> terms) {
  return Polynomial(n, std::move(terms));
}

// Central differences of f.value.
inline std::vector<double> numeric_gradient(const CostFunction& f, std::span<const double> x,
                                            double h = 1e-6) {
  std::vector<double> g(x.size()), p(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = h * std::max(1.0, std::abs(x[i]));
    p[i] = x[i] + s;
    const double up = f.value(p);
    p[i] = x[i] - s;
    const double dn = f.value(p);
    p[i] = x[i];
    g[i] = (up - dn) / (2.0 * s);
  }
  return g;
}

}  // namespace opd::testing

#endif  // OPD_TESTS_HELPERS_HPP_
