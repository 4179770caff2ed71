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

// Instance files: one JSON document per instance. Degrees are stored as
// rational strings, reals in shortest round-trip form.

#ifndef OPD_INSTANCE_IO_HPP_
#define OPD_INSTANCE_IO_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "opd/auction.hpp"
#include "opd/covering.hpp"
#include "opd/packing.hpp"
#include "opd/polynomial.hpp"

namespace opd {

enum class InstanceKind { kCovering, kPacking, kAuction };

const char* kind_name(InstanceKind kind);
std::optional<InstanceKind> parse_kind(const std::string& name);

struct FormsCost {
  double p = 2.0;
  std::vector<std::vector<double>> forms;
};

struct InstanceFile {
  InstanceKind kind = InstanceKind::kCovering;
  std::size_t n = 0;
  std::optional<Polynomial> polynomial;  // exactly one of polynomial / forms
  std::optional<FormsCost> forms;
  std::vector<std::vector<double>> rounds;  // covering and packing
  std::vector<std::vector<double>> buyers;  // auction: dense tables by bitmask
  std::map<std::string, std::string> metadata;

  void validate() const;
};

std::string serialize(const InstanceFile& instance);
InstanceFile parse_instance(const std::string& text);
InstanceFile load_instance(const std::string& path);
void save_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// FNV-1a over the serialized form; seeds the oracle restarts.
std::uint64_t instance_hash(const InstanceFile& instance);

std::shared_ptr<const CostFunction> make_cost(const InstanceFile& instance);
CoveringInstance to_covering(const InstanceFile& instance);
PackingInstance to_packing(const InstanceFile& instance);
AuctionInstance to_auction(const InstanceFile& instance);

}  // namespace opd

#endif  // OPD_INSTANCE_IO_HPP_
