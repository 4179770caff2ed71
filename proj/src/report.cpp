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

#include "opd/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "opd/conjugate.hpp"
#include "opd/error.hpp"
#include "opd/offline.hpp"
#include "opd/surrogate.hpp"

namespace opd {
namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

json jnum(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return v;
  }
  throw InvalidInstance("report field is not a number");
}

json jvec(std::span<const double> v) {
  json a = json::array();
  for (double e : v) a.push_back(jnum(e));
  return a;
}

std::vector<double> vec(const json& j, std::size_t n) {
  if (!j.is_array() || j.size() != n) throw InvalidInstance("report snapshot has wrong length");
  std::vector<double> out;
  out.reserve(n);
  for (const auto& e : j) out.push_back(num(e));
  return out;
}

const json& at(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw InvalidInstance(std::string("report lacks '") + key + "'");
  return *it;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

double rel_gap(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d / std::max(1.0, inf_norm(b));
}

// Named checks; repeated observations keep the worst margin.
class Checks {
 public:
  void add(const std::string& name, double margin, double tol, const std::string& detail = "") {
    CheckResult& c = slot(name);
    if (c.state == CheckState::kSkip) {
      c.state = CheckState::kPass;
      c.margin = kInf;
    }
    if (std::isnan(margin)) margin = -kInf;
    if (margin < c.margin) {
      c.margin = margin;
      if (!detail.empty()) c.detail = detail;
    }
    if (margin < -tol) c.state = CheckState::kFail;
  }
  void fail(const std::string& name, const std::string& detail) {
    CheckResult& c = slot(name);
    c.state = CheckState::kFail;
    c.margin = -kInf;
    c.detail = detail;
  }
  void skip(const std::string& name, const std::string& detail) {
    CheckResult& c = slot(name);
    c.detail = detail;
  }
  std::vector<CheckResult> take() {
    for (auto& c : list_) {
      if (c.state == CheckState::kSkip) c.margin = 0.0;
    }
    return std::move(list_);
  }

 private:
  CheckResult& slot(const std::string& name) {
    for (auto& c : list_) {
      if (c.name == name) return c;
    }
    CheckResult c;
    c.name = name;
    c.state = CheckState::kSkip;
    c.margin = kInf;
    list_.push_back(c);
    return list_.back();
  }
  std::vector<CheckResult> list_;
};

class Summary {
 public:
  void put(const std::string& key, const std::string& value) { items.emplace_back(key, value); }
  void put(const std::string& key, double value) { put(key, format_real(value)); }
  void put_count(const std::string& key, std::size_t value) { put(key, std::to_string(value)); }
  std::vector<std::pair<std::string, std::string>> items;
};

json oracle_json(const OracleResult& r) {
  json j;
  j["value"] = jnum(r.value);
  j["status"] = status_name(r.status);
  j["kkt"] = jnum(r.kkt_residual);
  j["descent"] = jnum(r.descent_value);
  j["grid"] = jnum(r.grid_value);
  j["grid_used"] = r.grid_used;
  j["grid_levels"] = r.grid_levels;
  j["grid_change"] = jnum(r.grid_change);
  j["point"] = jvec(r.point);
  return j;
}

struct OracleView {
  bool present = false;
  bool usable = false;
  double value = 0.0;
  std::string status;
};

OracleView oracle_view(const json& rec, Checks& ck) {
  OracleView o;
  auto it = rec.find("oracle");
  if (it == rec.end() || it->is_null()) {
    ck.skip("oracle-status", "oracle not run");
    return o;
  }
  o.present = true;
  o.value = num(at(*it, "value"));
  o.status = at(*it, "status").get<std::string>();
  o.usable = o.status == "converged" || o.status == "grid-certified";
  if (o.usable) {
    ck.add("oracle-status", 0.0, 0.0, o.status);
  } else {
    ck.fail("oracle-status", o.status);
  }
  return o;
}

std::vector<double> parse_list(const std::string& s, std::size_t n) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (out.size() == 1 && n > 1) out.assign(n, out[0]);
  if (out.size() != n) throw InvalidInstance("L needs one value or n values");
  return out;
}

double param_real(const std::map<std::string, std::string>& p, const char* key, double fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw InvalidInstance(std::string("parameter ") + key + " must be a number");
  }
}

// ---------------------------------------------------------------- covering

CoveringConfig covering_config(const json& params, std::size_t n) {
  CoveringConfig cfg;
  cfg.eta_factor = num(at(params, "eta_factor"));
  cfg.step_rel = num(at(params, "step_rel"));
  cfg.tol_feas = num(at(params, "tol_feas"));
  cfg.max_steps = at(params, "max_steps").get<std::size_t>();
  if (auto it = params.find("L"); it != params.end() && !it->is_null()) {
    cfg.initial_L = vec(*it, n);
  }
  if (!at(params, "rho_from_formula").get<bool>()) cfg.rho = num(at(params, "rho"));
  return cfg;
}

void eval_covering(const InstanceFile& inst, RunReport& rep) {
  const json& rec = rep.record;
  CoveringInstance ci = to_covering(inst);
  const std::size_t n = ci.n;
  auto mode = parse_covering_mode(rep.mode);
  if (!mode) throw InvalidInstance("unknown covering mode '" + rep.mode + "'");
  const json& params = at(rec, "params");
  CoveringConfig cfg = covering_config(params, n);
  const double rho = num(at(params, "rho"));
  CoveringPlan plan = plan_covering(ci, *mode, cfg);
  Checks ck;
  ck.add("parameters", -std::abs(plan.rho - rho) / std::max(1.0, std::abs(rho)), 1e-12,
         "rho recomputed from the instance");

  const CostFunction& f = *plan.original;
  const CostFunction& g = *plan.run_cost;
  ConjugateOracle fstar(f);
  const json& rounds = at(rec, "rounds");
  if (rounds.size() != ci.rounds.size()) {
    ck.fail("snapshots", "round count differs from the instance");
    rep.checks = ck.take();
    return;
  }
  rep.columns = {"round", "y", "C", "C_run", "P", "slack", "increase_margin", "budget",
                 "seed_cost", "steps"};
  rep.rows.clear();
  std::vector<double> prev = plan.L;
  const double run_L = g.value(prev);
  double run_prev = run_L;
  double sum_y = 0.0, sum_seed = 0.0, sum_budget = 0.0;
  std::vector<double> zc(n, 0.0);
  double C = f.value(prev), Crun = run_L, P = 0.0;
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    const json& r = rounds[k];
    const auto& a = ci.rounds[k];
    const double y = num(at(r, "y"));
    const std::vector<double> x = vec(at(r, "x"), n);
    const std::vector<double> z = vec(at(r, "z"), n);
    const double seed = num(at(r, "seed_cost"));
    const double budget = num(at(r, "budget"));
    for (std::size_t i = 0; i < n; ++i) zc[i] += y * a[i];
    ck.add("dual-consistency", -rel_gap(z, zc), 1e-9, "z = A^T y");
    double mono = y;
    for (std::size_t i = 0; i < n; ++i) mono = std::min(mono, x[i] - prev[i]);
    ck.add("monotonicity", mono / std::max(1.0, inf_norm(x)), 0.0,
           "round " + std::to_string(k + 1));
    double feas = kInf;
    for (std::size_t j = 0; j <= k; ++j) feas = std::min(feas, dot(ci.rounds[j], x) - 1.0);
    ck.add("feasibility", feas + cfg.tol_feas, 0.0, "round " + std::to_string(k + 1));
    sum_y += y;
    sum_seed += seed;
    sum_budget += budget;
    C = f.value(x);
    Crun = g.value(x);
    ConjugateValue fz = fstar(z);
    P = fz.infinite ? -kInf : sum_y - fz.value;
    ck.add("weak-duality", (C - P) / std::max(1.0, std::abs(C)), 1e-8,
           "round " + std::to_string(k + 1));
    const double inc = rho * y - (Crun - run_prev - seed - budget);
    ck.add("cost-increase-per-round", inc / std::max(1.0, std::abs(Crun)), 1e-9,
           "round " + std::to_string(k + 1));
    rep.rows.push_back({std::to_string(k + 1), format_real(y), format_real(C), format_real(Crun),
                        format_real(P), format_real(dot(a, x) - 1.0), format_real(inc),
                        format_real(budget), format_real(seed),
                        std::to_string(at(r, "steps").get<std::size_t>())});
    prev = x;
    run_prev = Crun;
  }
  const std::vector<double>& xm = prev;
  const double r = cfg.step_rel;
  if (!rounds.empty()) {
    const double agg = rho * sum_y - (Crun - run_L - sum_seed - sum_budget);
    ck.add("cost-increase-total", agg / std::max(1.0, std::abs(Crun)), 1e-9);
    ck.add("dual-consistency", -rel_gap(vec(at(rec, "z_final"), n), zc), 1e-9, "final z");
    std::vector<double> grad = g.grad(xm);
    const double factor =
        (plan.dual_bound == DualBound::kLogMu ? std::log(plan.mu) : 1.0 / plan.lambda_bound) / rho *
        (1.0 + r);
    double worst = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      const double bound = factor * grad[i];
      worst = std::min(worst, (bound - zc[i]) / std::max(1.0, bound));
    }
    ck.add("dual-coordinate-bound", worst, 1e-9);
    const double share = Crun > 0.0 ? sum_budget / Crun : (sum_budget > 0.0 ? kInf : 0.0);
    ck.add("integration-budget", 0.02 - share, 0.0, "budget / C_run must stay below 2%");
  }
  double surrogate_lhs = 0.0, surrogate_rhs = 0.0;
  if (*mode == CoveringMode::kGeneralPoly && !rounds.empty()) {
    const double lam = plan.lambda_bound;
    const double tt = plan.tau_run;
    const double c = plan.N_pow_lambda / (rho * lam);
    if (c * (1.0 + r) <= 1.0 && tt > 1.0) {
      std::vector<double> w(n);
      for (std::size_t i = 0; i < n; ++i) w[i] = plan.N_pow_lambda * zc[i];
      ConjugateOracle gstar(*plan.comparison);
      ConjugateValue gv = gstar(w);
      surrogate_lhs = gv.infinite ? kInf : gv.value / plan.N_pow_lambda;
      const double e = tt / (tt - 1.0);
      surrogate_rhs = std::pow(c * (1.0 + r), e) * (tt - 1.0) * Crun;
      const double margin = surrogate_rhs > 0.0 ? (surrogate_rhs - surrogate_lhs) / surrogate_rhs
                                                : -surrogate_lhs;
      ck.add("surrogate-dual-bound", margin, 1e-9, "g*(N^l z)/N^l against the ftilde bound");
    } else {
      ck.skip("surrogate-dual-bound", "N^l/(rho l) exceeds 1");
    }
  }
  OracleView o = oracle_view(rec, ck);
  const double extra = sum_seed + sum_budget;
  const double guarantee = o.usable ? plan.guarantee(o.value, extra) : kInf;
  if (o.usable) {
    ck.add("oracle-consistency", (C - o.value) / std::max(1.0, std::abs(C)), 1e-6, "C >= C_opt");
    if (plan.rho_from_formula) {
      ck.add("ratio-bound", (guarantee - C) / std::max(1.0, std::abs(C)), 1e-9);
    } else {
      ck.skip("ratio-bound", "rho overridden");
    }
  } else {
    ck.skip("ratio-bound", "no usable oracle value");
  }

  Summary s;
  s.put("kind", "covering");
  s.put("mode", rep.mode);
  s.put_count("n", n);
  s.put_count("rounds", rounds.size());
  s.put("tau", f.tau());
  s.put("rho", rho);
  s.put("rho_source", plan.rho_from_formula ? "formula" : "override");
  s.put("lambda", plan.lambda ? plan.lambda->to_string()
                               : plan.lambda_bound > 0.0 ? format_real(plan.lambda_bound) : "none");
  s.put("lambda_log_base", "2");
  s.put("mu", plan.mu);
  s.put("eta", plan.eta);
  s.put("step_rel", r);
  s.put("C", C);
  s.put("C_run", Crun);
  s.put("sum_y", sum_y);
  s.put("P", P);
  s.put("seed_cost", sum_seed);
  s.put("budget", sum_budget);
  s.put("budget_share", Crun > 0.0 ? sum_budget / Crun : 0.0);
  s.put("C_opt", o.present ? o.value : std::numeric_limits<double>::quiet_NaN());
  s.put("oracle_status", o.present ? o.status : "none");
  s.put("ratio", o.usable && o.value > 0.0 ? C / o.value : std::numeric_limits<double>::quiet_NaN());
  s.put("ratio_bound", plan.ratio_bound());
  s.put("guarantee", guarantee);
  s.put("bound_chain", plan.bound_chain());
  if (*mode == CoveringMode::kGeneralPoly) {
    s.put("surrogate_dual_lhs", surrogate_lhs);
    s.put("surrogate_dual_rhs", surrogate_rhs);
  }
  rep.checks = ck.take();
  rep.summary = std::move(s.items);
}

void run_covering_report(const InstanceFile& inst, const RunOptions& opt, RunReport& rep) {
  CoveringInstance ci = to_covering(inst);
  auto mode = parse_covering_mode(rep.mode);
  CoveringConfig cfg;
  cfg.rho = opt.rho;
  cfg.eta_factor = param_real(opt.params, "eta_factor", cfg.eta_factor);
  cfg.step_rel = param_real(opt.params, "step_rel", cfg.step_rel);
  cfg.tol_feas = param_real(opt.params, "tol_feas", cfg.tol_feas);
  cfg.max_steps = static_cast<std::size_t>(
      param_real(opt.params, "max_steps", static_cast<double>(cfg.max_steps)));
  if (auto it = opt.params.find("L"); it != opt.params.end()) {
    cfg.initial_L = parse_list(it->second, ci.n);
  }
  CoveringPlan plan = plan_covering(ci, *mode, cfg);
  PrimalDualState st = run_covering(ci, plan, cfg);

  json params;
  params["rho"] = jnum(plan.rho);
  params["rho_from_formula"] = plan.rho_from_formula;
  params["eta_factor"] = jnum(cfg.eta_factor);
  params["step_rel"] = jnum(cfg.step_rel);
  params["tol_feas"] = jnum(cfg.tol_feas);
  params["max_steps"] = cfg.max_steps;
  params["L"] = cfg.initial_L ? jvec(*cfg.initial_L) : json(nullptr);
  json rounds = json::array();
  std::vector<double> z(ci.n, 0.0);
  for (std::size_t k = 0; k < ci.rounds.size(); ++k) {
    for (std::size_t i = 0; i < ci.n; ++i) z[i] += st.y[k] * ci.rounds[k][i];
    const RoundRecord& rr = st.round_log[k];
    json r;
    r["y"] = jnum(st.y[k]);
    r["x"] = jvec(st.x_after[k]);
    r["z"] = jvec(z);
    r["seed_cost"] = jnum(rr.seed_cost);
    r["budget"] = jnum(rr.budget);
    r["steps"] = rr.steps;
    r["free_moves"] = rr.free_moves;
    rounds.push_back(std::move(r));
  }
  rep.record["params"] = params;
  rep.record["rounds"] = rounds;
  rep.record["z_final"] = jvec(st.z);
  if (opt.oracle) {
    CoveringOracleSettings os;
    os.seed = instance_hash(inst) ^ opt.seed;
    rep.record["oracle"] = oracle_json(covering_opt(*ci.cost, ci.rounds, os));
  }
}

// ----------------------------------------------------------------- packing

void eval_packing(const InstanceFile& inst, RunReport& rep) {
  const json& rec = rep.record;
  PackingInstance pi = to_packing(inst);
  const std::size_t n = pi.n;
  PackingPreprocessed pre = preprocess_linear(pi);
  const json& params = at(rec, "params");
  const double rho = num(at(params, "rho"));
  const bool formula = at(params, "rho_from_formula").get<bool>();
  const Polynomial& fh = pre.fhat_star;
  const double lambda = pre.lambda.to_double();
  Checks ck;
  if (formula && !fh.empty()) {
    const double expect = packing_rho(pre.lambda);
    ck.add("parameters", -std::abs(expect - rho) / std::max(1.0, rho), 1e-12,
           "rho recomputed from the instance");
  }
  const json& rounds = at(rec, "rounds");
  if (rounds.size() != pi.rounds.size()) {
    ck.fail("snapshots", "round count differs from the instance");
    rep.checks = ck.take();
    return;
  }
  rep.columns = {"round", "skipped", "b", "w", "y", "P", "C", "growth_margin", "slack"};
  rep.rows.clear();
  std::vector<double> zc(n, 0.0), xprev(n, 0.0), zprev(n, 0.0), pt(n), gpt(n), rz(n);
  double sum_w = 0.0, P = 0.0, C = 0.0;
  const double floor = 1.0 - std::pow(rho, 1.0 - lambda);
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    const json& r = rounds[k];
    const bool skipped = at(r, "skipped").get<bool>();
    const double w = num(at(r, "w"));
    const double y = num(at(r, "y"));
    const std::vector<double> x = vec(at(r, "x"), n);
    const std::vector<double> z = vec(at(r, "z"), n);
    const std::string tag = "round " + std::to_string(k + 1);
    if (skipped != pre.skip[k]) ck.fail("snapshots", tag + ": skip flag differs");
    if (skipped) {
      ck.add("dual-consistency", -std::abs(w) - std::abs(y), 0.0, tag + ": skipped round");
    } else {
      ck.add("dual-consistency", -std::abs(y * pre.b[k] - w) / std::max(1.0, std::abs(w)), 1e-12,
             tag + ": w = b y");
      for (std::size_t i = 0; i < n; ++i) zc[i] += w * pre.scaled[k][i];
    }
    ck.add("dual-consistency", -rel_gap(z, zc), 1e-9, tag + ": z = A^T y");
    for (std::size_t i = 0; i < n; ++i) rz[i] = rho * zc[i];
    std::vector<double> xc = fh.grad(rz);
    ck.add("dual-consistency", -rel_gap(x, xc), 1e-9, tag + ": x = grad f*(rho z)");
    double mono = std::min(w, y);
    for (std::size_t i = 0; i < n; ++i) {
      mono = std::min({mono, x[i] - xprev[i], z[i] - zprev[i]});
    }
    ck.add("monotonicity", mono, 0.0, tag);
    double feas = kInf;
    for (std::size_t j = 0; j <= k; ++j) {
      if (!pre.skip[j]) feas = std::min(feas, dot(pre.scaled[j], x) - 1.0);
    }
    if (std::isfinite(feas)) ck.add("feasibility", feas, 1e-9, tag);
    double growth = kInf;
    if (!skipped && w > 0.0) {
      for (int s = 1; s < 8; ++s) {
        const double ts = w * s / 8.0;
        for (std::size_t i = 0; i < n; ++i) pt[i] = zprev[i] + ts * pre.scaled[k][i];
        fh.gradient(pt, gpt);
        growth = std::min(growth, (1.0 - dot(pre.scaled[k], gpt)) - floor);
      }
      ck.add("growth-rate", growth, 1e-12, tag);
    }
    sum_w += w;
    const double fz = fh.value(zc);
    const double frz = fh.value(rz);
    P = sum_w - fz;
    C = dot(rz, x) - frz;
    const double scale = std::max({1.0, std::abs(P), std::abs(C)});
    ck.add("dual-growth", (sum_w - frz / rho) / scale, 1e-9, tag);
    ck.add("weak-duality", (C - P) / scale, 1e-9, tag);
    rep.rows.push_back({std::to_string(k + 1), skipped ? "1" : "0", format_real(pre.b[k]),
                        format_real(w), format_real(y), format_real(P), format_real(C),
                        format_real(growth), format_real(skipped ? 0.0 : dot(pre.scaled[k], x) - 1.0)});
    xprev = x;
    zprev = z;
  }
  double numeric_C = C;
  if (!fh.empty() && !rounds.empty()) {
    ConjugateOracle fc(fh);
    ConjugateValue v = fc(xprev);
    numeric_C = v.infinite ? kInf : v.value;
    ck.add("closed-form-cost", -std::abs(numeric_C - C) / std::max(1.0, std::abs(C)), 1e-6,
           "closed form against the numeric conjugate");
  }
  const double certificate =
      fh.empty() ? kInf : packing_certificate(pre.tau, lambda, rho);
  OracleView o = oracle_view(rec, ck);
  double ratio = std::numeric_limits<double>::quiet_NaN();
  if (o.usable) {
    const double scale = std::max(1.0, std::abs(o.value));
    ck.add("oracle-consistency", (o.value - P) / scale, 1e-6, "P <= P_opt");
    if (P > 0.0) {
      ratio = o.value / P;
    } else if (o.value <= 1e-12) {
      ratio = 1.0;
    }
    if (!formula) {
      ck.skip("ratio-bound", "rho overridden");
    } else if (std::isfinite(ratio)) {
      ck.add("ratio-bound", (certificate - ratio) / std::max(1.0, certificate), 1e-9);
    } else {
      ck.fail("ratio-bound", "P(y) is not positive while P_opt is");
    }
  } else {
    ck.skip("ratio-bound", "no usable oracle value");
  }
  Summary s;
  s.put("kind", "packing");
  s.put("mode", rep.mode);
  s.put_count("n", n);
  s.put_count("rounds", rounds.size());
  std::size_t skipped = 0;
  for (bool b : pre.skip) skipped += b ? 1 : 0;
  s.put_count("skipped", skipped);
  s.put("lambda", pre.lambda.to_string());
  s.put("tau", pre.tau);
  s.put("rho", rho);
  s.put("rho_source", formula ? "formula" : "override");
  s.put("P", P);
  s.put("sum_w", sum_w);
  s.put("C", C);
  s.put("C_numeric", numeric_C);
  s.put("P_opt", o.present ? o.value : std::numeric_limits<double>::quiet_NaN());
  s.put("oracle_status", o.present ? o.status : "none");
  s.put("ratio", ratio);
  s.put("certificate", certificate);
  {
    std::ostringstream os;
    os.precision(6);
    os << "(tau-1) rho^l / (rho^(l-1) - 1) with tau=" << pre.tau << " l=" << pre.lambda.to_string()
       << " rho=" << rho << ": " << certificate;
    s.put("bound_chain", os.str());
  }
  rep.checks = ck.take();
  rep.summary = std::move(s.items);
}

void run_packing_report(const InstanceFile& inst, const RunOptions& opt, RunReport& rep) {
  PackingInstance pi = to_packing(inst);
  PackingRun pr = run_packing(pi, opt.rho);
  json params;
  params["rho"] = jnum(pr.rho);
  params["rho_from_formula"] = pr.rho_from_formula;
  json rounds = json::array();
  for (std::size_t k = 0; k < pi.rounds.size(); ++k) {
    json r;
    r["skipped"] = static_cast<bool>(pr.pre.skip[k]);
    r["w"] = jnum(pr.state.w[k]);
    r["y"] = jnum(pr.state.y[k]);
    r["x"] = jvec(pr.state.x_after[k]);
    r["z"] = jvec(pr.state.z_after[k]);
    rounds.push_back(std::move(r));
  }
  rep.record["params"] = params;
  rep.record["rounds"] = rounds;
  rep.record["growth_margin"] = jnum(pr.state.growth_margin);
  if (opt.oracle) {
    rep.record["oracle"] = oracle_json(packing_opt(pi.cost_star, pi.rounds, instance_hash(inst) ^ opt.seed));
  }
}

// ----------------------------------------------------------------- auction

void eval_auction(const InstanceFile& inst, RunReport& rep) {
  const json& rec = rep.record;
  AuctionInstance ai = to_auction(inst);
  const std::size_t n = ai.n;
  const std::size_t subsets = std::size_t{1} << n;
  AuctionPrepared prep = prepare_auction(ai);
  const Polynomial& fh = prep.fhat_star;
  const json& params = at(rec, "params");
  const double rho = num(at(params, "rho"));
  const bool formula = at(params, "rho_from_formula").get<bool>();
  const bool resolved = at(params, "resolved").get<bool>();
  const double eps = resolved ? num(at(params, "epsilon")) : 0.0;
  const double R0 = resolved ? num(at(params, "R0")) : 0.0;
  Checks ck;
  if (formula) ck.add("parameters", -std::abs(rho - 2.0), 0.0, "rho = 2");
  if (resolved) {
    const std::size_t b = at(params, "buyer").get<std::size_t>();
    if (b >= prep.values.size()) {
      ck.fail("parameters", "parameter buyer out of range");
    } else {
      EpsilonDelta ed = compute_epsilon_delta(fh, prep.values[b], rho);
      const double d = num(at(params, "delta"));
      ck.add("parameters", -std::abs(ed.epsilon - eps) / std::max(1e-300, ed.epsilon), 1e-12,
             "epsilon recomputed");
      ck.add("parameters", -std::abs(ed.delta - d) / std::max(1e-300, ed.delta), 1e-12,
             "delta recomputed");
    }
  }
  const json& buyers = at(rec, "buyers");
  if (buyers.size() != prep.values.size()) {
    ck.fail("snapshots", "buyer count differs from the instance");
    rep.checks = ck.take();
    return;
  }
  const bool traced = !buyers.empty() && buyers[0].contains("trace");
  rep.columns = {"buyer", "u", "u_posthoc", "mass", "R", "budget", "steps", "audit_margin", "P", "C"};
  if (traced) rep.columns.push_back("trace");
  rep.rows.clear();
  std::vector<double> zc(n, 0.0), xprev(n, 0.0), zprev(n, 0.0), rz(n), xs;
  double vy = 0.0, sum_u = 0.0, sum_R = 0.0, P = 0.0, C = 0.0;
  for (std::size_t k = 0; k < buyers.size(); ++k) {
    const json& b = buyers[k];
    const std::string tag = "buyer " + std::to_string(k + 1);
    const std::vector<double> y = vec(at(b, "y"), subsets);
    const double u = num(at(b, "u"));
    const double R = num(at(b, "R"));
    const double budget = num(at(b, "budget"));
    const double audit = num(at(b, "audit_margin"));
    const std::vector<double> x = vec(at(b, "x"), n);
    const std::vector<double> z = vec(at(b, "z"), n);
    double mass = 0.0, ymin = 0.0;
    for (std::size_t S = 0; S < subsets; ++S) {
      mass += y[S];
      ymin = std::min(ymin, y[S]);
      if (S == 0 || y[S] == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) {
        if (S >> i & 1U) zc[i] += y[S];
      }
    }
    ck.add("buyer-mass", -std::abs(mass - 1.0), 1e-12, tag);
    ck.add("dual-consistency", -rel_gap(z, zc), 1e-9, tag + ": z = A^T y");
    for (std::size_t i = 0; i < n; ++i) rz[i] = rho * zc[i];
    ck.add("dual-consistency", -rel_gap(x, fh.grad(rz)), 1e-9, tag + ": x = grad f*(rho z)");
    double mono = std::min(ymin, u);
    for (std::size_t i = 0; i < n; ++i) mono = std::min({mono, x[i] - xprev[i], z[i] - zprev[i]});
    ck.add("monotonicity", mono, 0.0, tag);
    subset_sums(x, xs);
    double best = 0.0;
    for (std::size_t S = 0; S < subsets; ++S) best = std::max(best, prep.values[k][S] - xs[S]);
    ck.add("dual-feasibility", u - best, 1e-9, tag);
    ck.add("selection-audit", audit, 1e-12, tag);
    ck.add("step-error", eps * R - budget, 1e-12 * std::max(1.0, eps * R), tag);
    vy += dot(prep.values[k], y);
    sum_u += u;
    sum_R += R;
    const double fz = fh.value(zc);
    const double frz = fh.value(rz);
    P = vy - fz;
    C = sum_u + dot(rz, x) - frz;
    const double scale = std::max({1.0, std::abs(P), std::abs(C)});
    ck.add("weak-duality", (C - P) / scale, 1e-9, tag);
    ck.add("welfare-accounting", (vy - (sum_u + frz / rho - eps * sum_R)) / scale, 1e-9, tag);
    std::vector<std::string> row = {std::to_string(k + 1), format_real(u),
                                    format_real(num(at(b, "u_posthoc"))), format_real(mass),
                                    format_real(R), format_real(budget),
                                    std::to_string(at(b, "steps").get<std::size_t>()),
                                    format_real(audit), format_real(P), format_real(C)};
    if (traced) {
      std::string t;
      for (const auto& run : at(b, "trace")) {
        if (!t.empty()) t += ';';
        t += std::to_string(run[0].get<std::uint64_t>()) + "x" + std::to_string(run[1].get<std::uint64_t>());
      }
      row.push_back(t);
    }
    rep.rows.push_back(std::move(row));
    xprev = x;
    zprev = z;
  }
  double l1 = 0.0;
  for (double v : zc) l1 += v;
  const double fz_final = fh.value(zc);
  if (resolved && l1 >= R0 * (1.0 - 1e-12)) {
    ck.add("error-budget", (fz_final / 10.0 - eps * sum_R) / std::max(1.0, fz_final), 1e-9,
           "eps R <= f*(z)/10");
  } else {
    ck.skip("error-budget", "||z||_1 below R0");
  }
  for (std::size_t i = 0; i < n; ++i) rz[i] = rho * zc[i];
  const double frz = fh.value(rz);
  const double denom = frz / rho - fz_final - eps * sum_R;
  const double tau = fh.empty() ? 0.0 : fh.profile().tau.to_double();
  double certificate = kInf;
  if (denom > 0.0) certificate = std::max(1.0, (tau - 1.0) * frz / denom);
  if (frz == 0.0) certificate = 1.0;
  OracleView o = oracle_view(rec, ck);
  double ratio = std::numeric_limits<double>::quiet_NaN();
  if (o.usable) {
    ck.add("oracle-consistency", (o.value - P) / std::max(1.0, std::abs(o.value)), 1e-6, "P <= P_opt");
    if (P > 0.0) {
      ratio = o.value / P;
    } else if (o.value <= 1e-12) {
      ratio = 1.0;
    }
    if (!formula) {
      ck.skip("ratio-bound", "rho overridden");
    } else if (std::isfinite(ratio) && std::isfinite(certificate)) {
      ck.add("ratio-bound", (certificate - ratio) / std::max(1.0, certificate), 1e-9);
    } else {
      ck.skip("ratio-bound", "certificate undefined");
    }
  } else {
    ck.skip("ratio-bound", "no usable oracle value");
  }
  double shift = 0.0;
  for (double v : prep.shift) shift += v;
  Summary s;
  s.put("kind", "auction");
  s.put("mode", rep.mode);
  s.put_count("n", n);
  s.put_count("buyers", buyers.size());
  s.put("rho", rho);
  s.put("rho_source", formula ? "formula" : "override");
  s.put("epsilon", eps);
  s.put("delta", resolved ? num(at(params, "delta")) : 0.0);
  s.put("lipschitz", resolved ? num(at(params, "lipschitz")) : 0.0);
  s.put("R0", R0);
  s.put("beta", resolved ? num(at(params, "beta")) : 0.0);
  s.put("welfare", P);
  s.put("value_shift", shift);
  s.put("welfare_with_shift", P + shift);
  s.put("C", C);
  s.put("R", sum_R);
  s.put("eps_R", eps * sum_R);
  s.put("P_opt", o.present ? o.value : std::numeric_limits<double>::quiet_NaN());
  s.put("oracle_status", o.present ? o.status : "none");
  s.put("ratio", ratio);
  s.put("certificate", certificate);
  {
    std::ostringstream os;
    os.precision(6);
    os << "max(1, (tau-1) f*(rho z) / (f*(rho z)/rho - f*(z) - eps R)) with tau=" << tau
       << ": " << certificate;
    s.put("bound_chain", os.str());
  }
  rep.checks = ck.take();
  rep.summary = std::move(s.items);
}

void run_auction_report(const InstanceFile& inst, const RunOptions& opt, RunReport& rep) {
  AuctionInstance ai = to_auction(inst);
  AuctionSettings settings;
  settings.trace = opt.trace;
  AuctionRun ar = run_auction(ai, opt.rho, settings);
  const EpsilonDelta& p = ar.state.params;
  json params;
  params["rho"] = jnum(ar.rho);
  params["rho_from_formula"] = ar.rho_from_formula;
  params["resolved"] = p.resolved;
  params["epsilon"] = jnum(p.epsilon);
  params["delta"] = jnum(p.delta);
  params["lipschitz"] = jnum(p.lipschitz);
  params["R0"] = jnum(p.R0);
  params["beta"] = jnum(p.beta);
  params["buyer"] = p.buyer;
  json buyers = json::array();
  for (std::size_t k = 0; k < ar.state.buyers.size(); ++k) {
    const BuyerRecord& b = ar.state.buyers[k];
    json j;
    j["y"] = jvec(b.y);
    j["u"] = jnum(b.u);
    j["u_posthoc"] = jnum(b.u_posthoc);
    j["R"] = jnum(b.R);
    j["mass"] = jnum(b.mass);
    j["steps"] = b.steps;
    j["budget"] = jnum(b.budget);
    j["audit_margin"] = jnum(b.audit_margin);
    j["x"] = jvec(ar.state.x_after[k]);
    j["z"] = jvec(ar.state.z_after[k]);
    if (opt.trace) {
      json t = json::array();
      for (const auto& [S, c] : b.trace) t.push_back({S, c});
      j["trace"] = t;
    }
    buyers.push_back(std::move(j));
  }
  rep.record["params"] = params;
  rep.record["buyers"] = buyers;
  if (opt.oracle) {
    rep.record["oracle"] =
        oracle_json(auction_opt(ar.prep.fhat_star, ar.prep.values, instance_hash(inst) ^ opt.seed));
  }
}

void evaluate(const InstanceFile& inst, RunReport& rep) {
  if (rep.status == "unbounded") {
    Checks ck;
    bool raised = false;
    try {
      if (inst.kind == InstanceKind::kPacking) {
        run_packing(to_packing(inst));
      } else if (inst.kind == InstanceKind::kAuction) {
        run_auction(to_auction(inst));
      }
    } catch (const Unbounded&) {
      raised = true;
    }
    if (raised) {
      ck.add("unbounded-detected", 0.0, 0.0);
    } else {
      ck.fail("unbounded-detected", "instance runs to completion");
    }
    rep.checks = ck.take();
    rep.summary = {{"kind", rep.kind}, {"mode", rep.mode}, {"status", "unbounded"},
                   {"message", rep.message}};
    return;
  }
  if (inst.kind == InstanceKind::kCovering) {
    eval_covering(inst, rep);
  } else if (inst.kind == InstanceKind::kPacking) {
    eval_packing(inst, rep);
  } else {
    eval_auction(inst, rep);
  }
  std::size_t failed = 0;
  for (const auto& c : rep.checks) failed += c.state == CheckState::kFail ? 1 : 0;
  rep.summary.emplace_back("checks_failed", std::to_string(failed));
}

void check_mode(const InstanceFile& inst, const std::string& mode) {
  bool ok = false;
  switch (inst.kind) {
    case InstanceKind::kCovering: ok = parse_covering_mode(mode).has_value(); break;
    case InstanceKind::kPacking: ok = mode == "packing"; break;
    case InstanceKind::kAuction: ok = mode == "auction"; break;
  }
  if (!ok) {
    throw InvalidInstance("mode '" + mode + "' is incompatible with kind " + kind_name(inst.kind));
  }
}

}  // namespace

const char* check_state_name(CheckState s) {
  switch (s) {
    case CheckState::kPass: return "pass";
    case CheckState::kFail: return "fail";
    case CheckState::kSkip: return "skip";
  }
  return "fail";
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string default_mode(const InstanceFile& instance) {
  switch (instance.kind) {
    case InstanceKind::kPacking: return "packing";
    case InstanceKind::kAuction: return "auction";
    case InstanceKind::kCovering: break;
  }
  if (instance.forms) return "lp";
  if (instance.polynomial && instance.polynomial->profile().lambda_mono) return "sharp";
  return "general";
}

RunReport run(const InstanceFile& instance, const RunOptions& options) {
  RunReport rep;
  rep.kind = kind_name(instance.kind);
  rep.mode = options.mode.empty() ? default_mode(instance) : options.mode;
  check_mode(instance, rep.mode);
  rep.record = json::object();
  try {
    switch (instance.kind) {
      case InstanceKind::kCovering: run_covering_report(instance, options, rep); break;
      case InstanceKind::kPacking: run_packing_report(instance, options, rep); break;
      case InstanceKind::kAuction: run_auction_report(instance, options, rep); break;
    }
  } catch (const Unbounded& e) {
    rep.status = "unbounded";
    rep.message = e.what();
    rep.record = json::object();
  }
  evaluate(instance, rep);
  return rep;
}

std::vector<CheckResult> check(const InstanceFile& instance, const RunReport& report) {
  RunReport copy;
  copy.kind = report.kind;
  copy.mode = report.mode;
  copy.status = report.status;
  copy.message = report.message;
  copy.record = report.record;
  if (copy.kind != kind_name(instance.kind)) {
    CheckResult c;
    c.name = "snapshots";
    c.state = CheckState::kFail;
    c.detail = "report kind differs from the instance";
    return {c};
  }
  check_mode(instance, copy.mode);
  evaluate(instance, copy);
  return copy.checks;
}

std::string report_json(const RunReport& report) {
  ojson j;
  j["kind"] = report.kind;
  j["mode"] = report.mode;
  j["status"] = report.status;
  j["message"] = report.message;
  ojson summary = ojson::object();
  for (const auto& [k, v] : report.summary) summary[k] = v;
  j["summary"] = summary;
  ojson checks = ojson::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"state", check_state_name(c.state)},
                      {"margin", format_real(c.margin)},
                      {"detail", c.detail}});
  }
  j["checks"] = checks;
  j["columns"] = report.columns;
  j["rows"] = report.rows;
  j["record"] = ojson::parse(report.record.dump());
  return j.dump(2) + "\n";
}

RunReport parse_report(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInstance(std::string("malformed report: ") + e.what());
  }
  RunReport r;
  r.kind = at(j, "kind").get<std::string>();
  r.mode = at(j, "mode").get<std::string>();
  r.status = at(j, "status").get<std::string>();
  r.message = at(j, "message").get<std::string>();
  r.record = at(j, "record");
  // Summary order is part of the layout; the sorted-key parse would lose it.
  const ojson ordered = ojson::parse(text);
  if (ordered.contains("summary")) {
    for (const auto& [k, v] : ordered["summary"].items()) r.summary.emplace_back(k, v.get<std::string>());
  }
  r.columns = at(j, "columns").get<std::vector<std::string>>();
  r.rows = at(j, "rows").get<std::vector<std::vector<std::string>>>();
  for (const auto& c : at(j, "checks")) {
    CheckResult cr;
    cr.name = at(c, "name").get<std::string>();
    const std::string st = at(c, "state").get<std::string>();
    cr.state = st == "pass" ? CheckState::kPass : st == "skip" ? CheckState::kSkip : CheckState::kFail;
    const json& m = at(c, "margin");
    cr.margin = m.is_string() ? num(m) : m.get<double>();
    cr.detail = at(c, "detail").get<std::string>();
    r.checks.push_back(std::move(cr));
  }
  return r;
}

std::string report_csv(const RunReport& report) {
  std::ostringstream os;
  for (std::size_t i = 0; i < report.columns.size(); ++i) {
    os << (i ? "," : "") << report.columns[i];
  }
  os << "\n";
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

std::string summary_block(const RunReport& report) {
  std::ostringstream os;
  os << "status=" << report.status << "\n";
  for (const auto& [k, v] : report.summary) {
    if (k == "status") continue;
    os << k << "=" << v << "\n";
  }
  for (const auto& c : report.checks) {
    os << "check." << c.name << "=" << check_state_name(c.state) << "\n";
  }
  return os.str();
}

int exit_code(const std::vector<CheckResult>& checks, const std::string& status) {
  if (status == "unbounded") {
    for (const auto& c : checks) {
      if (c.state == CheckState::kFail) return 2;
    }
    return 3;
  }
  bool oracle = false;
  for (const auto& c : checks) {
    if (c.state != CheckState::kFail) continue;
    if (c.name == "oracle-status") {
      oracle = true;
    } else {
      return 2;
    }
  }
  return oracle ? 4 : 0;
}

int exit_code(const RunReport& report) { return exit_code(report.checks, report.status); }

}  // namespace opd
