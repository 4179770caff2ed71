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

// Hot inner loops with a scalar reference implementation and an AVX2 variant.
// Both variants perform the same floating-point operations in the same order,
// so results are bit-identical; the AVX2 path only vectorizes across
// independent monomials (or subsets).

#ifndef OPD_KERNELS_HPP_
#define OPD_KERNELS_HPP_

#include <cstddef>
#include <cstdint>

namespace opd::kernels {

enum class Isa { kScalar, kAvx2 };

const char* isa_name(Isa isa);
bool avx2_available();

// Process-wide selection. Defaults to the best supported ISA; the environment
// variable OPD_SIMD=scalar forces the reference path.
Isa active_isa();
void set_active_isa(Isa isa);

// Monomials over a power table. idx is variable-major: idx[l * count + j] is
// the table slot that holds x_l^{d_lj} for monomial j.
struct TermLayout {
  const double* coeff = nullptr;
  const std::int32_t* idx = nullptr;
  std::size_t count = 0;
  std::size_t vars = 0;
};

// out[j] = coeff[j] * prod_l table[idx[l][j]]
void monomial_terms(const TermLayout& layout, const double* table, double* out, Isa isa);

// out[j] = coeff[j] * prod_{l != var} table[idx[l][j]] * table[didx[j]] * scale[j],
// or 0 where didx[j] < 0 (monomial does not contain the variable).
void monomial_partials(const TermLayout& layout, std::size_t var, const std::int32_t* didx,
                       const double* scale, const double* table, double* out, Isa isa);

struct ArgMax {
  std::uint32_t index = 0;
  double value = 0.0;
};

// Smallest j maximizing a[j] - b[j]. count must be >= 1.
ArgMax argmax_difference(const double* a, const double* b, std::size_t count, Isa isa);

namespace scalar {
void monomial_terms(const TermLayout& layout, const double* table, double* out);
void monomial_partials(const TermLayout& layout, std::size_t var, const std::int32_t* didx,
                       const double* scale, const double* table, double* out);
ArgMax argmax_difference(const double* a, const double* b, std::size_t count);
}  // namespace scalar

namespace avx2 {
void monomial_terms(const TermLayout& layout, const double* table, double* out);
void monomial_partials(const TermLayout& layout, std::size_t var, const std::int32_t* didx,
                       const double* scale, const double* table, double* out);
ArgMax argmax_difference(const double* a, const double* b, std::size_t count);
}  // namespace avx2

}  // namespace opd::kernels

#endif  // OPD_KERNELS_HPP_
