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

#ifndef OPD_GENERATORS_HPP_
#define OPD_GENERATORS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "opd/instance_io.hpp"

namespace opd {

using GenParams = std::map<std::string, std::string>;

// Families:
//   random-poly       n, N (powered forms), tau, homogeneous, separable, m, density
//   lp-linear-forms   n, l, d, p, m, density
//   mixed-cover-pack  n, l, d, m, density (p = log2 l)
//   packing-poly      n, N, tau, linear, pure_linear, m, density
//   auction-random    n, buyers, tau, linear, shift
// Convex polynomials are built as weighted sums of powers of non-negative
// linear forms, expanded into monomials.
InstanceFile generate(const std::string& family, const GenParams& params, std::uint64_t seed);

std::vector<std::string> generator_families();

}  // namespace opd

#endif  // OPD_GENERATORS_HPP_
