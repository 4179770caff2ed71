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

#include "opd/kernels.hpp"

namespace opd::kernels::scalar {

void monomial_terms(const TermLayout& layout, const double* table, double* out) {
  const std::size_t count = layout.count;
  for (std::size_t j = 0; j < count; ++j) {
    double prod = layout.coeff[j];
    for (std::size_t l = 0; l < layout.vars; ++l) prod *= table[layout.idx[l * count + j]];
    out[j] = prod;
  }
}

void monomial_partials(const TermLayout& layout, std::size_t var, const std::int32_t* didx,
                       const double* scale, const double* table, double* out) {
  const std::size_t count = layout.count;
  for (std::size_t j = 0; j < count; ++j) {
    if (didx[j] < 0) {
      out[j] = 0.0;
      continue;
    }
    double prod = layout.coeff[j];
    for (std::size_t l = 0; l < var; ++l) prod *= table[layout.idx[l * count + j]];
    prod *= table[didx[j]];
    for (std::size_t l = var + 1; l < layout.vars; ++l) prod *= table[layout.idx[l * count + j]];
    out[j] = prod * scale[j];
  }
}

ArgMax argmax_difference(const double* a, const double* b, std::size_t count) {
  ArgMax best{0, a[0] - b[0]};
  for (std::size_t j = 1; j < count; ++j) {
    double g = a[j] - b[j];
    if (g > best.value) best = {static_cast<std::uint32_t>(j), g};
  }
  return best;
}

}  // namespace opd::kernels::scalar
