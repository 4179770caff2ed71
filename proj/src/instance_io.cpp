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

#include "opd/instance_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "opd/error.hpp"
#include "opd/surrogate.hpp"

namespace opd {
namespace {

using nlohmann::json;

json degree_json(const Rational& r) { return r.to_string(); }

Rational parse_degree(const json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  throw InvalidInstance("degree must be an integer or a rational string");
}

double parse_real(const json& j, const char* what) {
  if (!j.is_number()) throw InvalidInstance(std::string(what) + " must be a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw InvalidInstance(std::string(what) + " must be finite");
  return v;
}

std::vector<double> parse_vector(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidInstance(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(parse_real(e, what));
  return out;
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw InvalidInstance(std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

const char* kind_name(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::kCovering: return "covering";
    case InstanceKind::kPacking: return "packing";
    case InstanceKind::kAuction: return "auction";
  }
  return "covering";
}

std::optional<InstanceKind> parse_kind(const std::string& name) {
  for (InstanceKind k : {InstanceKind::kCovering, InstanceKind::kPacking, InstanceKind::kAuction}) {
    if (name == kind_name(k)) return k;
  }
  return std::nullopt;
}

void InstanceFile::validate() const {
  if (n == 0) throw InvalidInstance("n must be positive");
  if (polynomial.has_value() == forms.has_value()) {
    throw InvalidInstance("instance needs exactly one cost description");
  }
  if (polynomial && polynomial->dim() != n) throw DimensionMismatch("cost dimension differs from n");
  if (forms) {
    if (kind != InstanceKind::kCovering) throw InvalidInstance("lp_forms costs are covering-only");
    if (forms->forms.empty()) throw InvalidInstance("lp_forms needs at least one form");
    for (const auto& f : forms->forms) {
      if (f.size() != n) throw DimensionMismatch("form has wrong length");
    }
  }
  switch (kind) {
    case InstanceKind::kCovering: to_covering(*this).validate(); break;
    case InstanceKind::kPacking: to_packing(*this).validate(); break;
    case InstanceKind::kAuction: to_auction(*this).validate(); break;
  }
}

std::string serialize(const InstanceFile& instance) {
  json j;
  j["kind"] = kind_name(instance.kind);
  j["n"] = instance.n;
  json cost;
  if (instance.polynomial) {
    cost["type"] = "polynomial";
    json monos = json::array();
    for (const auto& m : instance.polynomial->monomials()) {
      json d = json::array();
      for (const auto& r : m.degrees) d.push_back(degree_json(r));
      monos.push_back({{"coeff", m.coeff}, {"degrees", d}});
    }
    cost["monomials"] = monos;
  } else if (instance.forms) {
    cost["type"] = "lp_forms";
    cost["p"] = instance.forms->p;
    cost["forms"] = instance.forms->forms;
  }
  j["cost"] = cost;
  if (instance.kind == InstanceKind::kAuction) {
    json buyers = json::array();
    for (const auto& table : instance.buyers) {
      json values = json::object();
      for (std::size_t S = 0; S < table.size(); ++S) values[std::to_string(S)] = table[S];
      buyers.push_back({{"values", values}});
    }
    j["buyers"] = buyers;
  } else {
    j["rounds"] = instance.rounds;
  }
  j["metadata"] = instance.metadata;
  return j.dump(2) + "\n";
}

InstanceFile parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInstance(std::string("malformed instance document: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInstance("instance document must be an object");
  InstanceFile out;
  const json& kind = field(j, "kind");
  if (!kind.is_string()) throw InvalidInstance("kind must be a string");
  auto k = parse_kind(kind.get<std::string>());
  if (!k) throw InvalidInstance("unknown kind '" + kind.get<std::string>() + "'");
  out.kind = *k;
  const json& n = field(j, "n");
  if (!n.is_number_unsigned() || n.get<std::size_t>() == 0) {
    throw InvalidInstance("n must be a positive integer");
  }
  out.n = n.get<std::size_t>();

  const json& cost = field(j, "cost");
  const json& type = field(cost, "type");
  if (type == "polynomial") {
    std::vector<Monomial> monos;
    for (const auto& m : field(cost, "monomials")) {
      Monomial mono;
      mono.coeff = parse_real(field(m, "coeff"), "coeff");
      const json& d = field(m, "degrees");
      if (!d.is_array() || d.size() != out.n) throw DimensionMismatch("degree vector has wrong length");
      for (const auto& e : d) mono.degrees.push_back(parse_degree(e));
      monos.push_back(std::move(mono));
    }
    out.polynomial = Polynomial(out.n, std::move(monos));
  } else if (type == "lp_forms") {
    FormsCost fc;
    fc.p = parse_real(field(cost, "p"), "p");
    for (const auto& f : field(cost, "forms")) fc.forms.push_back(parse_vector(f, "form"));
    out.forms = std::move(fc);
  } else {
    throw InvalidInstance("unknown cost type");
  }

  if (out.kind == InstanceKind::kAuction) {
    if (out.n > kMaxAuctionItems) throw InvalidInstance("auctions support at most 16 items");
    const std::size_t subsets = std::size_t{1} << out.n;
    for (const auto& b : field(j, "buyers")) {
      std::vector<double> table(subsets, 0.0);
      const json& values = field(b, "values");
      if (!values.is_object()) throw InvalidInstance("buyer values must be an object");
      for (const auto& [key, val] : values.items()) {
        std::size_t pos = 0;
        unsigned long long S = 0;
        try {
          S = std::stoull(key, &pos, 10);
        } catch (const std::exception&) {
          pos = 0;
        }
        if (pos != key.size() || key.empty() || S >= subsets) {
          throw InvalidInstance("bad bundle key '" + key + "'");
        }
        table[S] = parse_real(val, "bundle value");
      }
      out.buyers.push_back(std::move(table));
    }
  } else {
    for (const auto& r : field(j, "rounds")) out.rounds.push_back(parse_vector(r, "round"));
  }
  if (auto it = j.find("metadata"); it != j.end()) {
    if (!it->is_object()) throw InvalidInstance("metadata must be an object");
    for (const auto& [key, val] : it->items()) {
      out.metadata[key] = val.is_string() ? val.get<std::string>() : val.dump();
    }
  }
  out.validate();
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

InstanceFile load_instance(const std::string& path) { return parse_instance(read_text(path)); }

std::uint64_t instance_hash(const InstanceFile& instance) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize(instance)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::shared_ptr<const CostFunction> make_cost(const InstanceFile& instance) {
  if (instance.polynomial) return std::make_shared<Polynomial>(*instance.polynomial);
  if (instance.forms) {
    return std::make_shared<SumOfPoweredForms>(instance.forms->forms, instance.forms->p);
  }
  throw InvalidInstance("instance has no cost");
}

CoveringInstance to_covering(const InstanceFile& instance) {
  if (instance.kind != InstanceKind::kCovering) throw InvalidInstance("not a covering instance");
  CoveringInstance c;
  c.n = instance.n;
  c.cost = make_cost(instance);
  c.rounds = instance.rounds;
  return c;
}

PackingInstance to_packing(const InstanceFile& instance) {
  if (instance.kind != InstanceKind::kPacking) throw InvalidInstance("not a packing instance");
  if (!instance.polynomial) throw InvalidInstance("packing needs a polynomial cost");
  PackingInstance p;
  p.n = instance.n;
  p.cost_star = *instance.polynomial;
  p.rounds = instance.rounds;
  return p;
}

AuctionInstance to_auction(const InstanceFile& instance) {
  if (instance.kind != InstanceKind::kAuction) throw InvalidInstance("not an auction instance");
  if (!instance.polynomial) throw InvalidInstance("auction needs a polynomial cost");
  AuctionInstance a;
  a.n = instance.n;
  a.cost_star = *instance.polynomial;
  a.values = instance.buyers;
  return a;
}

}  // namespace opd
