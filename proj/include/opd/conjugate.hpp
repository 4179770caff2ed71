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

#ifndef OPD_CONJUGATE_HPP_
#define OPD_CONJUGATE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "opd/cost.hpp"

namespace opd {

struct ConjugateSettings {
  int max_iter = 10000;
  // Projected-gradient stopping threshold, multiplied by (1 + ||z||_2).
  double tol = 1e-10;
  double divergence = 1e12;
  int random_starts = 3;
  std::uint64_t seed = 0x6f7064u;
};

struct ConjugateValue {
  bool infinite = false;
  double value = 0.0;
  std::vector<double> maximizer;
  bool converged = true;
};

// f*(z) = sup_{x >= 0} <x, z> - f(x), by multi-start projected gradient ascent.
class ConjugateOracle {
 public:
  explicit ConjugateOracle(const CostFunction& base, ConjugateSettings settings = {});

  ConjugateValue operator()(std::span<const double> z) const;
  const CostFunction& base() const { return base_; }
  const ConjugateSettings& settings() const { return settings_; }

 private:
  const CostFunction& base_;
  ConjugateSettings settings_;
  std::vector<std::vector<double>> starts_;
};

ConjugateValue conjugate_eval(const ConjugateOracle& oracle, std::span<const double> z);

// |f*(grad f(x)) - (<x, grad f(x)> - f(x))|; +inf if the conjugate diverges.
double conjugate_of_gradient_identity_check(const CostFunction& f, std::span<const double> x,
                                            const ConjugateSettings& settings = {});

}  // namespace opd

#endif  // OPD_CONJUGATE_HPP_
