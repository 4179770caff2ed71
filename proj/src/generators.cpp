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

#include "opd/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "opd/error.hpp"

namespace opd {
namespace {

class Params {
 public:
  explicit Params(const GenParams& p) : p_(p) {}

  long integer(const std::string& key, long fallback, long lo, long hi) const {
    auto it = p_.find(key);
    if (it == p_.end()) return fallback;
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(it->second, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != it->second.size() || it->second.empty()) {
      throw InvalidInstance("parameter " + key + " must be an integer");
    }
    if (v < lo || v > hi) {
      throw InvalidInstance("parameter " + key + " must lie in [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
    }
    return v;
  }

  double real(const std::string& key, double fallback) const {
    auto it = p_.find(key);
    if (it == p_.end()) return fallback;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(it->second, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != it->second.size() || !std::isfinite(v)) {
      throw InvalidInstance("parameter " + key + " must be a real number");
    }
    return v;
  }

  Rational rational(const std::string& key, Rational fallback) const {
    auto it = p_.find(key);
    return it == p_.end() ? fallback : Rational::parse(it->second);
  }

  bool flag(const std::string& key, bool fallback) const {
    return integer(key, fallback ? 1 : 0, 0, 1) == 1;
  }

 private:
  const GenParams& p_;
};

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(Rng& rng, std::size_t count) {
  return std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
}

// weight * (sum_i c_i x_i)^k expanded over the support.
void expand_power(std::size_t n, const std::vector<std::size_t>& support,
                  const std::vector<double>& c, int k, double weight, std::vector<Monomial>& out) {
  const std::size_t s = support.size();
  std::vector<int> parts(s, 0);
  std::vector<double> fact(static_cast<std::size_t>(k) + 1, 1.0);
  for (int i = 1; i <= k; ++i) fact[static_cast<std::size_t>(i)] = fact[static_cast<std::size_t>(i) - 1] * i;
  // Enumerate compositions of k into s non-negative parts.
  auto emit = [&]() {
    double coeff = weight * fact[static_cast<std::size_t>(k)];
    Monomial m;
    m.degrees.assign(n, Rational(0));
    for (std::size_t t = 0; t < s; ++t) {
      coeff /= fact[static_cast<std::size_t>(parts[t])];
      coeff *= std::pow(c[t], parts[t]);
      m.degrees[support[t]] = Rational(parts[t]);
    }
    m.coeff = coeff;
    out.push_back(std::move(m));
  };
  auto rec = [&](auto&& self, std::size_t t, int left) -> void {
    if (t + 1 == s) {
      parts[t] = left;
      emit();
      return;
    }
    for (int v = left; v >= 0; --v) {
      parts[t] = v;
      self(self, t + 1, left - v);
    }
  };
  rec(rec, 0, k);
}

struct ConvexShape {
  std::size_t n = 1;
  std::size_t forms = 1;
  Rational tau{2};
  bool homogeneous = true;
  bool separable = false;
};

// Sum of weighted powers of non-negative linear forms. Every variable belongs
// to at least one form, so every variable carries its pure power.
Polynomial random_convex(const ConvexShape& shape, Rng& rng) {
  const std::size_t n = shape.n;
  const bool integral = shape.tau.is_integer();
  const bool separable = shape.separable || !integral;
  if (separable && shape.forms < n) {
    throw InvalidInstance("separable polynomials need N >= n");
  }
  std::vector<Monomial> monos;
  const long tau_int = integral ? static_cast<long>(shape.tau.to_double()) : 0;
  for (std::size_t f = 0; f < shape.forms; ++f) {
    std::vector<std::size_t> support;
    if (shape.forms < n) {
      for (std::size_t i = f; i < n; i += shape.forms) support.push_back(i);
    } else {
      support.push_back(f % n);
      if (!separable && n > 1 && uniform(rng, 0.0, 1.0) < 0.5) {
        std::size_t other = pick(rng, n - 1);
        if (other >= support[0]) ++other;
        support.push_back(other);
        std::sort(support.begin(), support.end());
      }
    }
    std::vector<double> c(support.size());
    for (double& v : c) v = uniform(rng, 0.5, 1.5);
    const double weight = uniform(rng, 0.5, 1.5);
    if (!integral) {
      // Single-variable form: weight * c^tau x^tau.
      Monomial m;
      m.degrees.assign(n, Rational(0));
      m.degrees[support[0]] = shape.tau;
      m.coeff = weight * std::pow(c[0], shape.tau.to_double());
      monos.push_back(std::move(m));
      continue;
    }
    int k = static_cast<int>(tau_int);
    if (!shape.homogeneous && f > 0 && tau_int > 2) {
      k = 2 + static_cast<int>(pick(rng, static_cast<std::size_t>(tau_int - 1)));
    }
    expand_power(n, support, c, k, weight, monos);
  }
  return Polynomial(n, std::move(monos));
}

std::vector<std::vector<double>> random_rows(std::size_t n, std::size_t m, double density,
                                             const std::vector<bool>& allowed, Rng& rng) {
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < n; ++i) {
    if (allowed[i]) live.push_back(i);
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> a(n, 0.0);
    bool any = false;
    for (std::size_t i : live) {
      if (uniform(rng, 0.0, 1.0) < density) {
        a[i] = uniform(rng, 0.2, 1.5);
        any = true;
      }
    }
    if (!any) a[live[pick(rng, live.size())]] = uniform(rng, 0.2, 1.5);
    rows.push_back(std::move(a));
  }
  return rows;
}

std::string fmt_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

InstanceFile gen_random_poly(const Params& p, Rng& rng, InstanceKind kind, bool packing) {
  ConvexShape shape;
  shape.n = static_cast<std::size_t>(p.integer("n", 2, 1, 16));
  shape.forms = static_cast<std::size_t>(p.integer("N", static_cast<long>(shape.n), 1, 64));
  shape.tau = p.rational("tau", Rational(2));
  if (shape.tau < Rational(1) || (shape.tau == Rational(1) && !packing)) {
    throw InvalidInstance("tau must exceed 1");
  }
  shape.homogeneous = p.flag("homogeneous", !packing);
  shape.separable = p.flag("separable", false);
  const auto m = static_cast<std::size_t>(p.integer("m", 4, 0, 1000));
  const double density = p.real("density", 0.6);
  if (!(density > 0.0 && density <= 1.0)) throw InvalidInstance("density must lie in (0, 1]");
  const bool linear = packing && p.flag("linear", false);
  const bool pure_linear = packing && p.flag("pure_linear", false);

  InstanceFile out;
  out.kind = kind;
  out.n = shape.n;
  std::vector<Monomial> monos;
  if (!pure_linear) {
    if (!(shape.tau > Rational(1))) throw InvalidInstance("tau must exceed 1");
    monos = random_convex(shape, rng).monomials();
  }
  if (linear || pure_linear) {
    for (std::size_t i = 0; i < shape.n; ++i) {
      Monomial lin;
      lin.degrees.assign(shape.n, Rational(0));
      lin.degrees[i] = Rational(1);
      lin.coeff = uniform(rng, 0.05, 0.5);
      monos.push_back(std::move(lin));
    }
  }
  out.polynomial = Polynomial(shape.n, std::move(monos));
  out.rounds = random_rows(shape.n, m, density, std::vector<bool>(shape.n, true), rng);
  return out;
}

std::vector<std::vector<double>> random_forms(std::size_t n, std::size_t l, std::size_t d, Rng& rng) {
  std::vector<std::vector<double>> forms;
  for (std::size_t k = 0; k < l; ++k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    // Partial Fisher-Yates: exactly d distinct coordinates.
    for (std::size_t t = 0; t < d; ++t) std::swap(idx[t], idx[t + pick(rng, n - t)]);
    std::vector<double> c(n, 0.0);
    for (std::size_t t = 0; t < d; ++t) c[idx[t]] = uniform(rng, 0.5, 1.5);
    forms.push_back(std::move(c));
  }
  return forms;
}

InstanceFile gen_forms(const Params& p, Rng& rng, bool mixed) {
  const auto n = static_cast<std::size_t>(p.integer("n", 4, 1, 64));
  const auto l = static_cast<std::size_t>(p.integer("l", mixed ? 4 : 3, 1, 1024));
  const auto d = static_cast<std::size_t>(
      p.integer("d", static_cast<long>(std::min<std::size_t>(n, 2)), 1, static_cast<long>(n)));
  const auto m = static_cast<std::size_t>(p.integer("m", 4, 0, 1000));
  const double density = p.real("density", 0.6);
  if (!(density > 0.0 && density <= 1.0)) throw InvalidInstance("density must lie in (0, 1]");
  double pw = mixed ? std::log2(static_cast<double>(l)) : p.real("p", 2.0);
  if (!(pw >= 2.0)) {
    throw InvalidInstance(mixed ? "mixed-cover-pack needs l >= 4 (p = log2 l >= 2)"
                                : "p must be at least 2");
  }
  InstanceFile out;
  out.kind = InstanceKind::kCovering;
  out.n = n;
  FormsCost fc;
  fc.p = pw;
  fc.forms = random_forms(n, l, d, rng);
  std::vector<bool> covered(n, false);
  for (const auto& f : fc.forms) {
    for (std::size_t i = 0; i < n; ++i) covered[i] = covered[i] || f[i] > 0.0;
  }
  out.forms = std::move(fc);
  out.rounds = random_rows(n, m, density, covered, rng);
  return out;
}

InstanceFile gen_auction(const Params& p, Rng& rng) {
  ConvexShape shape;
  shape.n = static_cast<std::size_t>(p.integer("n", 2, 1, 10));
  shape.forms = shape.n;
  shape.tau = Rational(p.integer("tau", 2, 2, 6));
  shape.homogeneous = false;
  const auto buyers = static_cast<std::size_t>(p.integer("buyers", 3, 0, 64));
  const bool linear = p.flag("linear", false);
  const bool shift = p.flag("shift", false);
  InstanceFile out;
  out.kind = InstanceKind::kAuction;
  out.n = shape.n;
  std::vector<Monomial> monos = random_convex(shape, rng).monomials();
  if (linear) {
    for (std::size_t i = 0; i < shape.n; ++i) {
      Monomial lin;
      lin.degrees.assign(shape.n, Rational(0));
      lin.degrees[i] = Rational(1);
      lin.coeff = uniform(rng, 0.02, 0.2);
      monos.push_back(std::move(lin));
    }
  }
  out.polynomial = Polynomial(shape.n, std::move(monos));
  const std::size_t subsets = std::size_t{1} << shape.n;
  for (std::size_t j = 0; j < buyers; ++j) {
    std::vector<double> w(shape.n);
    for (double& v : w) v = uniform(rng, 0.2, 1.5);
    const double base = shift ? uniform(rng, 0.0, 0.5) : 0.0;
    std::vector<double> table(subsets, base);
    for (std::size_t S = 1; S < subsets; ++S) {
      double v = 0.0;
      for (std::size_t i = 0; i < shape.n; ++i) {
        if (S >> i & 1U) v += w[i];
      }
      table[S] = base + v * uniform(rng, 0.7, 1.3);
    }
    out.buyers.push_back(std::move(table));
  }
  return out;
}

}  // namespace

std::vector<std::string> generator_families() {
  return {"random-poly", "lp-linear-forms", "mixed-cover-pack", "packing-poly", "auction-random"};
}

InstanceFile generate(const std::string& family, const GenParams& params, std::uint64_t seed) {
  Params p(params);
  Rng rng(seed);
  InstanceFile out;
  if (family == "random-poly") {
    out = gen_random_poly(p, rng, InstanceKind::kCovering, false);
  } else if (family == "lp-linear-forms") {
    out = gen_forms(p, rng, false);
  } else if (family == "mixed-cover-pack") {
    out = gen_forms(p, rng, true);
  } else if (family == "packing-poly") {
    out = gen_random_poly(p, rng, InstanceKind::kPacking, true);
  } else if (family == "auction-random") {
    out = gen_auction(p, rng);
  } else {
    throw InvalidInstance("unknown generator family '" + family + "'");
  }
  out.metadata["family"] = family;
  out.metadata["seed"] = std::to_string(seed);
  for (const auto& [k, v] : params) out.metadata["param." + k] = v;
  if (out.forms) out.metadata["p"] = fmt_real(out.forms->p);
  out.validate();
  return out;
}

}  // namespace opd
