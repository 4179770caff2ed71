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

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define OPD_HAVE_X86 1
#endif

namespace opd::kernels::avx2 {

#ifdef OPD_HAVE_X86

#define OPD_AVX2 __attribute__((target("avx2")))

OPD_AVX2 void monomial_terms(const TermLayout& layout, const double* table, double* out) {
  const std::size_t count = layout.count;
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    __m256d prod = _mm256_loadu_pd(layout.coeff + j);
    for (std::size_t l = 0; l < layout.vars; ++l) {
      __m128i slot = _mm_loadu_si128(reinterpret_cast<const __m128i*>(layout.idx + l * count + j));
      prod = _mm256_mul_pd(prod, _mm256_i32gather_pd(table, slot, 8));
    }
    _mm256_storeu_pd(out + j, prod);
  }
  for (; j < count; ++j) {
    double prod = layout.coeff[j];
    for (std::size_t l = 0; l < layout.vars; ++l) prod *= table[layout.idx[l * count + j]];
    out[j] = prod;
  }
}

OPD_AVX2 void monomial_partials(const TermLayout& layout, std::size_t var,
                                const std::int32_t* didx, const double* scale,
                                const double* table, double* out) {
  const std::size_t count = layout.count;
  const __m128i zero_i = _mm_setzero_si128();
  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    __m128i d = _mm_loadu_si128(reinterpret_cast<const __m128i*>(didx + j));
    __m128i live = _mm_cmpgt_epi32(d, _mm_set1_epi32(-1));
    __m128i safe = _mm_max_epi32(d, zero_i);
    __m256d prod = _mm256_loadu_pd(layout.coeff + j);
    for (std::size_t l = 0; l < var; ++l) {
      __m128i slot = _mm_loadu_si128(reinterpret_cast<const __m128i*>(layout.idx + l * count + j));
      prod = _mm256_mul_pd(prod, _mm256_i32gather_pd(table, slot, 8));
    }
    prod = _mm256_mul_pd(prod, _mm256_i32gather_pd(table, safe, 8));
    for (std::size_t l = var + 1; l < layout.vars; ++l) {
      __m128i slot = _mm_loadu_si128(reinterpret_cast<const __m128i*>(layout.idx + l * count + j));
      prod = _mm256_mul_pd(prod, _mm256_i32gather_pd(table, slot, 8));
    }
    prod = _mm256_mul_pd(prod, _mm256_loadu_pd(scale + j));
    __m256d mask = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(live));
    _mm256_storeu_pd(out + j, _mm256_and_pd(prod, mask));
  }
  for (; j < count; ++j) {
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

OPD_AVX2 ArgMax argmax_difference(const double* a, const double* b, std::size_t count) {
  if (count < 8) return scalar::argmax_difference(a, b, count);
  __m256d best = _mm256_sub_pd(_mm256_loadu_pd(a), _mm256_loadu_pd(b));
  __m256d best_idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  __m256d idx = best_idx;
  const __m256d four = _mm256_set1_pd(4.0);
  std::size_t j = 4;
  for (; j + 4 <= count; j += 4) {
    idx = _mm256_add_pd(idx, four);
    __m256d g = _mm256_sub_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j));
    __m256d gt = _mm256_cmp_pd(g, best, _CMP_GT_OQ);
    best = _mm256_blendv_pd(best, g, gt);
    best_idx = _mm256_blendv_pd(best_idx, idx, gt);
  }
  alignas(32) double vals[4];
  alignas(32) double where[4];
  _mm256_store_pd(vals, best);
  _mm256_store_pd(where, best_idx);
  ArgMax out{static_cast<std::uint32_t>(where[0]), vals[0]};
  for (int lane = 1; lane < 4; ++lane) {
    auto lane_idx = static_cast<std::uint32_t>(where[lane]);
    if (vals[lane] > out.value || (vals[lane] == out.value && lane_idx < out.index)) {
      out = {lane_idx, vals[lane]};
    }
  }
  for (; j < count; ++j) {
    double g = a[j] - b[j];
    if (g > out.value) out = {static_cast<std::uint32_t>(j), g};
  }
  return out;
}

#else

void monomial_terms(const TermLayout& layout, const double* table, double* out) {
  scalar::monomial_terms(layout, table, out);
}

void monomial_partials(const TermLayout& layout, std::size_t var, const std::int32_t* didx,
                       const double* scale, const double* table, double* out) {
  scalar::monomial_partials(layout, var, didx, scale, table, out);
}

ArgMax argmax_difference(const double* a, const double* b, std::size_t count) {
  return scalar::argmax_difference(a, b, count);
}

#endif

}  // namespace opd::kernels::avx2
