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

#ifndef OPD_COST_HPP_
#define OPD_COST_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace opd {

// Convex, differentiable, monotone cost on the non-negative orthant with
// f(0) = 0.
class CostFunction {
 public:
  virtual ~CostFunction() = default;

  virtual std::size_t dim() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual void gradient(std::span<const double> x, std::span<double> out) const = 0;

  // Euler ceiling: <grad f(x), x> <= tau * f(x).
  virtual double tau() const = 0;
  // Largest known lambda with x -> grad_i f(x) / x_i^lambda monotone.
  virtual std::optional<double> lambda_mono() const = 0;
  virtual std::string describe() const = 0;

  std::vector<double> grad(std::span<const double> x) const {
    std::vector<double> out(dim());
    gradient(x, out);
    return out;
  }
};

}  // namespace opd

#endif  // OPD_COST_HPP_
