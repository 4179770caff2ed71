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

// Offline optima used as the denominators of empirical competitive ratios.

#ifndef OPD_OFFLINE_HPP_
#define OPD_OFFLINE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "opd/cost.hpp"
#include "opd/polynomial.hpp"

namespace opd {

enum class OracleStatus { kConverged, kGridCertified, kFailed, kUnbounded };

const char* status_name(OracleStatus status);

struct OracleResult {
  double value = 0.0;
  std::vector<double> point;
  OracleStatus status = OracleStatus::kFailed;
  double kkt_residual = 0.0;
  // Covering only: the two independent estimates and grid diagnostics.
  double descent_value = 0.0;
  double grid_value = 0.0;
  bool grid_used = false;
  int grid_levels = 0;
  double grid_change = 0.0;
};

struct CoveringOracleSettings {
  std::uint64_t seed = 0;
  int restarts = 8;
  std::size_t grid_max_dim = 6;
  double agreement = 1e-4;
};

// min f(x) s.t. <a_j, x> >= 1, x >= 0.
OracleResult covering_opt(const CostFunction& f, const std::vector<std::vector<double>>& rows,
                          const CoveringOracleSettings& settings = {});

// max sum_j y_j - f*(A^T y), y >= 0.
OracleResult packing_opt(const Polynomial& cost_star, const std::vector<std::vector<double>>& rows,
                         std::uint64_t seed = 0);

// max sum_j sum_S v_j(S) y_jS - f*(z), z_i = sum_{j, S containing i} y_jS,
// with y_j >= 0 and sum_S y_jS <= 1 per buyer. values[j][0] must be 0.
OracleResult auction_opt(const Polynomial& cost_star, const std::vector<std::vector<double>>& values,
                         std::uint64_t seed = 0);

}  // namespace opd

#endif  // OPD_OFFLINE_HPP_
