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

// Online combinatorial auction with production cost. Each buyer's unit of
// allocation mass is spread over bundles S, always taking a bundle that
// maximizes v_k(S) - x_S with x = grad f*(rho z).

#ifndef OPD_AUCTION_HPP_
#define OPD_AUCTION_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "opd/polynomial.hpp"

namespace opd {

constexpr std::size_t kMaxAuctionItems = 16;

struct AuctionInstance {
  std::size_t n = 0;
  Polynomial cost_star;
  // values[j][S] for every bitmask S in [0, 2^n).
  std::vector<std::vector<double>> values;

  void validate() const;
};

struct AuctionPrepared {
  std::vector<double> c;      // linear part of f*
  Polynomial fhat_star;       // remaining terms
  std::vector<std::vector<double>> values;  // v_j(S) - v_j(empty) - c_S
  std::vector<double> shift;  // v_j(empty)
};

AuctionPrepared prepare_auction(const AuctionInstance& instance);

struct EpsilonDelta {
  bool resolved = false;
  double epsilon = 0.0;
  double delta = 0.0;
  double lipschitz = 0.0;
  double R0 = 0.0;
  double beta = 0.0;
  std::size_t buyer = 0;  // index of the buyer that fixed the parameters
};

// Parameters from the first buyer with positive surplus beta.
EpsilonDelta compute_epsilon_delta(const Polynomial& fhat_star, std::span<const double> values,
                                   double rho);

struct BuyerRecord {
  std::vector<double> y;   // mass per bundle, indexed by bitmask
  double u = 0.0;          // integral of r(t)
  double u_posthoc = 0.0;  // max_S v(S) - x_S at round end
  double R = 0.0;          // time with a non-empty bundle
  double mass = 0.0;
  std::size_t steps = 0;
  double budget = 0.0;     // sum of (d fhat*(rho z)/rho - step * x_S(step start))
  double audit_margin = 0.0;  // min over steps of gamma_S - r + epsilon at step end
  std::vector<std::pair<std::uint32_t, std::uint64_t>> trace;  // (bundle, steps) runs
};

struct AuctionState {
  std::vector<double> z;
  std::vector<double> x;
  EpsilonDelta params;
  std::vector<BuyerRecord> buyers;
  std::vector<std::vector<double>> x_after;
  std::vector<std::vector<double>> z_after;
};

struct AuctionSettings {
  std::uint64_t max_steps = 50'000'000;
  bool trace = false;
};

void run_buyer(AuctionState& state, std::span<const double> values, const Polynomial& fhat_star,
               double rho, const AuctionSettings& settings = {});

struct AuctionRun {
  AuctionPrepared prep;
  AuctionState state;
  double rho = 2.0;
  bool rho_from_formula = true;
};

AuctionRun run_auction(const AuctionInstance& instance, std::optional<double> rho = std::nullopt,
                       const AuctionSettings& settings = {});

// x_S = sum_{i in S} x_i for every bitmask S.
void subset_sums(std::span<const double> x, std::vector<double>& out);

}  // namespace opd

#endif  // OPD_AUCTION_HPP_
