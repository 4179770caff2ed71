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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "opd/error.hpp"
#include "opd/kernels.hpp"

namespace opd::kernels {
namespace {

Isa initial_isa() {
  const char* env = std::getenv("OPD_SIMD");
  if (env != nullptr && std::string_view(env) == "scalar") return Isa::kScalar;
  return avx2_available() ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa == Isa::kAvx2 && !avx2_available()) throw Error("AVX2 not supported on this CPU");
  selected().store(isa, std::memory_order_relaxed);
}

void monomial_terms(const TermLayout& layout, const double* table, double* out, Isa isa) {
  if (isa == Isa::kAvx2) {
    avx2::monomial_terms(layout, table, out);
  } else {
    scalar::monomial_terms(layout, table, out);
  }
}

void monomial_partials(const TermLayout& layout, std::size_t var, const std::int32_t* didx,
                       const double* scale, const double* table, double* out, Isa isa) {
  if (isa == Isa::kAvx2) {
    avx2::monomial_partials(layout, var, didx, scale, table, out);
  } else {
    scalar::monomial_partials(layout, var, didx, scale, table, out);
  }
}

ArgMax argmax_difference(const double* a, const double* b, std::size_t count, Isa isa) {
  if (isa == Isa::kAvx2) return avx2::argmax_difference(a, b, count);
  return scalar::argmax_difference(a, b, count);
}

}  // namespace opd::kernels
