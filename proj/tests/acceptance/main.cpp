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

// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "opd/conjugate.hpp"
#include "opd/generators.hpp"
#include "opd/instance_io.hpp"
#include "opd/offline.hpp"
#include "opd/polynomial.hpp"
#include "opd/report.hpp"
#include "opd/surrogate.hpp"
#include "oracles.hpp"
#include "suites.hpp"

namespace {

using opd::CheckState;
using opd::InstanceFile;
using opd::RunOptions;
using opd::RunReport;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string summary(const RunReport& r, const std::string& key) {
  for (const auto& [k, v] : r.summary) {
    if (k == key) return v;
  }
  return "";
}

double summary_num(const RunReport& r, const std::string& key) {
  const std::string v = summary(r, key);
  if (v.empty()) return std::nan("");
  return std::stod(v);
}

const opd::CheckResult* find_check(const RunReport& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

// The named checks must all be present and pass. Returns the first failure.
std::string require(const RunReport& r, const std::vector<std::string>& names) {
  for (const auto& n : names) {
    const auto* c = find_check(r, n);
    if (c == nullptr) return n + " missing";
    if (c->state != CheckState::kPass) return n + " " + opd::check_state_name(c->state) + " " + c->detail;
  }
  return "";
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

RunReport run_default(const InstanceFile& inst, const std::string& mode, bool oracle = true,
                      std::map<std::string, std::string> params = {}) {
  RunOptions o;
  o.mode = mode;
  o.oracle = oracle;
  o.params = std::move(params);
  return opd::run(inst, o);
}

InstanceFile one_dim_packing() {
  InstanceFile f;
  f.kind = opd::InstanceKind::kPacking;
  f.n = 1;
  f.polynomial = opd::Polynomial(1, {{1.0, {opd::Rational(2)}}});
  f.rounds = {{1.0}};
  return f;
}

// ------------------------------------------------------------ criteria

Outcome packing_example() {
  RunOptions o;
  o.mode = "packing";
  o.rho = 2.0;
  RunReport r = opd::run(one_dim_packing(), o);
  const double y = std::stod(r.rows.at(0).at(4));
  const double P = summary_num(r, "P");
  const double Popt = summary_num(r, "P_opt");
  const double ratio = summary_num(r, "ratio");
  const double cert = summary_num(r, "certificate");
  const double y_ref = opd::testing::quadratic_packing_step(1.0, 1.0, 2.0);
  const double P_ref = y_ref - y_ref * y_ref;
  const double Popt_ref = opd::testing::quadratic_packing_opt(1.0, 1.0, 1.0);
  Outcome out;
  out.pass = std::abs(y - y_ref) <= 1e-9 && std::abs(P - P_ref) <= 1e-9 &&
             std::abs(Popt - Popt_ref) <= 1e-6 && ratio <= cert && std::abs(cert - 4.0) <= 1e-9 &&
             std::abs(ratio - Popt_ref / P_ref) <= 1e-5;
  out.detail = "y1=" + fmt(y) + " P=" + fmt(P) + " P_opt=" + fmt(Popt) + " ratio=" + fmt(ratio) +
               " certificate=" + fmt(cert);
  return out;
}

Outcome conjugate_closed_form() {
  Outcome out;
  double worst = 0.0;
  for (opd::Rational tau : {opd::Rational(2), opd::Rational(3), opd::Rational(3, 2)}) {
    const double t = tau.to_double();
    opd::Polynomial f(1, {{1.0 / t, {tau}}});
    opd::ConjugateOracle conj(f);
    for (int k = 0; k < 20; ++k) {
      const double z = std::pow(10.0, -3.0 + 6.0 * k / 19.0);
      const double num = conj(std::vector<double>{z}).value;
      const double ref = opd::testing::power_conjugate(t, z);
      worst = std::max(worst, std::abs(num - ref) / ref);
    }
  }
  out.pass = worst <= 1e-6;
  out.detail = "worst relative error " + fmt(worst) + " over tau in {2,3,3/2}, z in [1e-3,1e3]";
  return out;
}

Outcome conjugate_properties() {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(0.0, 2.0), ud(1.0, 3.0), ug(0.05, 1.0);
  double wa = 0.0, wb = 0.0, wc = 0.0;  // most negative scaled slack
  for (int trial = 0; trial < 200; ++trial) {
    const long n = 1 + trial % 4;
    opd::GenParams p = {{"n", std::to_string(n)}, {"N", std::to_string(n + trial % 3)},
                        {"tau", std::to_string(2 + trial % 3)},
                        {"homogeneous", trial % 2 ? "1" : "0"}, {"m", "1"}};
    InstanceFile inst = opd::generate("random-poly", p, 5000 + static_cast<std::uint64_t>(trial));
    const opd::Polynomial& f = *inst.polynomial;
    const double tau = f.tau();
    std::vector<double> x(n), dx(n);
    for (auto& v : x) v = ux(rng);
    const double delta = ud(rng), gamma = ug(rng);
    // (a) f(delta x) <= delta^tau f(x)
    for (long i = 0; i < n; ++i) dx[i] = delta * x[i];
    const double fx = f.value(x);
    const double fdx = f.value(dx);
    const double sa = std::pow(delta, tau) * fx;
    wa = std::min(wa, (sa - fdx) / std::max(1.0, sa));
    // (b) f*(gamma z) <= gamma^{tau/(tau-1)} f*(z) at z = grad f(x)
    std::vector<double> z = f.grad(x), gz(n);
    for (long i = 0; i < n; ++i) gz[i] = gamma * z[i];
    opd::ConjugateOracle conj(f);
    const double fz = conj(z).value;
    const double fgz = conj(gz).value;
    const double sb = std::pow(gamma, tau / (tau - 1.0)) * fz;
    wb = std::min(wb, (sb - fgz) / std::max(1.0, std::abs(fz)));
    // (c) f*(grad f(x)) = <x, grad f(x)> - f(x) <= (tau - 1) f(x)
    double xz = 0.0;
    for (long i = 0; i < n; ++i) xz += x[i] * z[i];
    const double closed = xz - fx;
    const double scale = std::max(1.0, std::abs(closed));
    wc = std::min({wc, -std::abs(fz - closed) / scale, ((tau - 1.0) * fx - closed) / scale});
  }
  Outcome out;
  out.pass = wa >= -1e-8 && wb >= -1e-8 && wc >= -1e-8;
  out.detail = "worst scaled slack a=" + fmt(wa) + " b=" + fmt(wb) + " c=" + fmt(wc) + " (200 triples)";
  return out;
}

Outcome covering_invariants(const std::vector<opd::testing::SuiteCase>& suite,
                            std::vector<RunReport>& reports) {
  Outcome out;
  double worst_share = 0.0;
  int failed = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    RunReport r = run_default(suite[i].instance, suite[i].mode);
    std::vector<std::string> need = {"feasibility", "monotonicity", "weak-duality",
                                     "cost-increase-per-round", "cost-increase-total",
                                     "dual-coordinate-bound", "integration-budget"};
    if (suite[i].mode == "general-poly") need.push_back("surrogate-dual-bound");
    const std::string why = require(r, need);
    worst_share = std::max(worst_share, summary_num(r, "budget_share"));
    if (!why.empty()) {
      if (failed++ == 0) out.detail = "case " + std::to_string(i) + " (" + suite[i].mode + "): " + why + "; ";
    }
    reports.push_back(std::move(r));
  }
  out.pass = failed == 0 && worst_share < 0.02;
  out.detail += std::to_string(suite.size() - failed) + "/" + std::to_string(suite.size()) +
                " instances pass, worst budget share " + fmt(worst_share);
  return out;
}

Outcome sharp_ratio() {
  std::vector<InstanceFile> suite = opd::testing::sharp_suite();
  Outcome out;
  double worst = 0.0;  // largest ratio / bound
  int bad = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    RunReport r = run_default(suite[i], "sharp");
    const double tau = summary_num(r, "tau");
    const double lambda = summary_num(r, "lambda");
    const double C = summary_num(r, "C");
    const double Copt = summary_num(r, "C_opt");
    const std::string status = summary(r, "oracle_status");
    const double bound = std::pow(tau / lambda, tau);
    const bool ok = (status == "converged" || status == "grid-certified") &&
                    C <= bound * Copt * (1.0 + 1e-9) + 1e-12;
    worst = std::max(worst, C / (bound * Copt));
    if (!ok && bad++ == 0) {
      out.detail = "case " + std::to_string(i) + " C=" + fmt(C) + " C_opt=" + fmt(Copt) +
                   " status=" + status + "; ";
    }
  }
  out.pass = bad == 0;
  out.detail += std::to_string(suite.size() - bad) + "/20 within (tau/lambda)^tau, worst C/(bound C_opt) " +
                fmt(worst);
  return out;
}

Outcome surrogate_sandwiches() {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ux(0.0, 2.0);
  std::bernoulli_distribution zero(0.15);
  double w_hat = 0.0, w_tilde = 0.0;
  int count_hat = 0, count_tilde = 0;
  for (int s = 0; s < 8; ++s) {
    const long n = 1 + s % 4;
    opd::GenParams ph = {{"n", std::to_string(n)}, {"N", std::to_string(n + s % 2 + 1)},
                         {"tau", std::to_string(2 + s % 3)}, {"m", "1"}};
    InstanceFile hom = opd::generate("random-poly", ph, 6000 + static_cast<std::uint64_t>(s));
    opd::GenParams pg = ph;
    pg["homogeneous"] = "0";
    InstanceFile gen = opd::generate("random-poly", pg, 6100 + static_cast<std::uint64_t>(s));
    const opd::Polynomial& fh = *hom.polynomial;
    const opd::Polynomial& fg = *gen.polynomial;
    auto sh = opd::build_fhat(fh, opd::default_lambda(fh.size()));
    auto st = opd::build_ftilde(fg, opd::default_lambda(fg.size()));
    std::vector<double> x(n);
    for (int k = 0; k < 500; ++k) {
      for (auto& v : x) v = zero(rng) ? 0.0 : ux(rng);
      const double gh = std::pow(fh.value(x), 1.0 + sh.lambda.to_double());
      const double scale_h = std::max(1.0, gh);
      auto a = opd::sandwich_check_fhat(fh, sh, x);
      w_hat = std::min({w_hat, a.upper / scale_h, a.lower / scale_h});
      const double gg = std::pow(fg.value(x), 1.0 + st.lambda.to_double());
      double gscale = 1.0;
      for (double v : fg.grad(x)) gscale = std::max(gscale, std::abs(v) * (1.0 + gg));
      auto b = opd::sandwich_check_ftilde(fg, st, x);
      w_tilde = std::min({w_tilde, b.lower / std::max(1.0, gg), b.upper / std::max(1.0, gg),
                          b.gradient / gscale});
    }
    ++count_hat;
    ++count_tilde;
  }
  Outcome out;
  out.pass = w_hat >= -1e-9 && w_tilde >= -1e-9;
  out.detail = "worst scaled slack fhat=" + fmt(w_hat) + " (" + std::to_string(count_hat) +
               " surrogates) ftilde=" + fmt(w_tilde) + " (" + std::to_string(count_tilde) +
               " surrogates), 500 points each";
  return out;
}

Outcome eta_insensitivity(const std::vector<opd::testing::SuiteCase>& suite) {
  Outcome out;
  double worst = 0.0;
  int tested = 0;
  std::string where;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const std::string& mode = suite[i].mode;
    if (mode == "general") continue;  // seeded from L, not from zero
    double lo = INFINITY, hi = -INFINITY;
    for (const char* eta : {"1e-6", "1e-9", "1e-12"}) {
      RunReport r = run_default(suite[i].instance, mode, false, {{"eta_factor", eta}});
      const double C = summary_num(r, "C");
      lo = std::min(lo, C);
      hi = std::max(hi, C);
    }
    const double spread = lo > 0.0 ? (hi - lo) / lo : 0.0;
    if (spread > worst) {
      worst = spread;
      where = " (case " + std::to_string(i) + ", " + mode + ")";
    }
    ++tested;
  }
  out.pass = worst < 0.005;
  out.detail = std::to_string(tested) + " zero-start instances, worst relative spread of C " + fmt(worst) + where;
  return out;
}

Outcome packing_suite() {
  Outcome out;
  int bad = 0;
  int skipped_rounds = 0;
  std::vector<InstanceFile> suite = opd::testing::packing_suite();
  for (std::size_t i = 0; i < suite.size(); ++i) {
    RunReport r = run_default(suite[i], "packing");
    const std::string why = require(r, {"feasibility", "dual-growth", "growth-rate", "weak-duality"});
    for (const auto& row : r.rows) skipped_rounds += row.at(1) == "1";
    if (!why.empty() && bad++ == 0) out.detail = "case " + std::to_string(i) + ": " + why + "; ";
  }
  InstanceFile lin = opd::generate("packing-poly", {{"n", "2"}, {"pure_linear", "1"}, {"m", "3"}}, 77);
  RunReport u = run_default(lin, "packing");
  const bool unbounded = u.status == "unbounded" && opd::exit_code(u) == 3;
  out.pass = bad == 0 && unbounded;
  out.detail += std::to_string(suite.size() - bad) + "/30 instances pass (" + std::to_string(skipped_rounds) +
                " skipped rounds), pure-linear instance status=" + u.status;
  return out;
}

InstanceFile single_buyer_auction() {
  InstanceFile f;
  f.kind = opd::InstanceKind::kAuction;
  f.n = 1;
  f.polynomial = opd::Polynomial(1, {{1.0, {opd::Rational(2)}}});
  f.buyers = {{0.0, 1.0}};
  return f;
}

Outcome auction_suite() {
  Outcome out;
  RunReport single = run_default(single_buyer_auction(), "auction");
  const double welfare = summary_num(single, "welfare");
  const double epsR = summary_num(single, "eps_R");
  const double lo = 3.0 / 16.0 - epsR - 1e-6;
  const bool single_ok = welfare >= lo && welfare <= 0.25 + 1e-12;
  out.detail = "single-buyer welfare " + fmt(welfare) + " in [" + fmt(lo) + ", 0.25]; ";
  int bad = 0;
  int budget_checked = 0;
  std::vector<InstanceFile> suite = opd::testing::auction_suite();
  for (std::size_t i = 0; i < suite.size(); ++i) {
    RunReport r = run_default(suite[i], "auction");
    std::string why = require(r, {"dual-feasibility", "selection-audit", "buyer-mass", "step-error"});
    if (const auto* c = find_check(r, "error-budget")) {
      if (c->state == CheckState::kPass) ++budget_checked;
      if (c->state == CheckState::kFail && why.empty()) why = "error-budget fail " + c->detail;
    }
    if (!why.empty() && bad++ == 0) out.detail += "case " + std::to_string(i) + ": " + why + "; ";
  }
  out.pass = single_ok && bad == 0;
  out.detail += std::to_string(suite.size() - bad) + "/20 auctions pass, error budget verified on " +
                std::to_string(budget_checked);
  return out;
}

Outcome oracle_agreement(const std::vector<opd::testing::SuiteCase>& suite,
                         const std::vector<RunReport>& covering_reports) {
  Outcome out;
  double worst_gap = 0.0;
  int compared = 0;
  int bad = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    if (suite[i].instance.n > 3) continue;
    const auto& o = covering_reports[i].record.at("oracle");
    const double d = o.at("descent").get<double>();
    const double g = o.at("grid").get<double>();
    const double gap = std::abs(d - g) / std::max(1e-300, std::max(std::abs(d), std::abs(g)));
    if (!o.at("grid_used").get<bool>() || !(gap <= 1e-4)) ++bad;
    worst_gap = std::max(worst_gap, gap);
    ++compared;
  }
  double worst_kkt = 0.0;
  for (const auto& inst : opd::testing::packing_suite()) {
    RunReport r = run_default(inst, "packing");
    worst_kkt = std::max(worst_kkt, r.record.at("oracle").at("kkt").get<double>());
  }
  for (const auto& inst : opd::testing::auction_suite()) {
    RunReport r = run_default(inst, "auction");
    worst_kkt = std::max(worst_kkt, r.record.at("oracle").at("kkt").get<double>());
  }
  out.pass = bad == 0 && worst_kkt < 1e-7;
  out.detail = std::to_string(compared) + " covering instances with n <= 3, worst descent/grid gap " +
               fmt(worst_gap) + "; packing/auction worst scaled KKT residual " + fmt(worst_kkt);
  return out;
}

Outcome determinism(const std::vector<opd::testing::SuiteCase>& suite) {
  Outcome out;
  int cases = 0;
  int bad = 0;
  std::vector<std::pair<InstanceFile, std::string>> pick;
  for (std::size_t i = 0; i < suite.size(); i += 7) pick.emplace_back(suite[i].instance, suite[i].mode);
  pick.emplace_back(opd::testing::packing_suite()[3], "packing");
  pick.emplace_back(opd::testing::auction_suite()[5], "auction");
  for (const auto& [inst, mode] : pick) {
    RunOptions o;
    o.mode = mode;
    o.seed = 5;
    o.trace = true;
    const std::string a = opd::report_json(opd::run(inst, o)) + opd::report_csv(opd::run(inst, o));
    const std::string b = opd::report_json(opd::run(inst, o)) + opd::report_csv(opd::run(inst, o));
    opd::GenParams gp;
    for (const auto& [k, v] : inst.metadata) {
      if (k.rfind("param.", 0) == 0) gp[k.substr(6)] = v;
    }
    const std::string family = inst.metadata.at("family");
    const std::uint64_t seed = std::stoull(inst.metadata.at("seed"));
    const std::string ga = opd::serialize(opd::generate(family, gp, seed));
    const std::string gb = opd::serialize(opd::generate(family, gp, seed));
    if (ga != opd::serialize(inst)) ++bad;
    if (a != b || ga != gb) ++bad;
    ++cases;
  }
  out.pass = bad == 0;
  out.detail = std::to_string(cases - bad) + "/" + std::to_string(cases) +
               " repeated runs byte-identical (report JSON, CSV, generator output)";
  return out;
}

}  // namespace

int main() {
  int failures = 0;
  auto emit = [&](int id, const char* name, const Outcome& o) {
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  };
  auto guarded = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    try {
      emit(id, name, fn());
    } catch (const std::exception& e) {
      emit(id, name, Outcome{false, std::string("exception: ") + e.what()});
    }
  };
  const auto suite = opd::testing::covering_suite();
  std::vector<RunReport> covering_reports;
  guarded(1, "packing worked example", packing_example);
  guarded(2, "conjugate closed forms", conjugate_closed_form);
  guarded(3, "conjugate scaling properties", conjugate_properties);
  guarded(4, "covering invariants", [&] { return covering_invariants(suite, covering_reports); });
  guarded(5, "sharp competitive ratio", sharp_ratio);
  guarded(6, "surrogate sandwiches", surrogate_sandwiches);
  guarded(7, "seed floor insensitivity", [&] { return eta_insensitivity(suite); });
  guarded(8, "packing invariants", packing_suite);
  guarded(9, "auction invariants", auction_suite);
  guarded(10, "offline oracle agreement", [&] {
    if (covering_reports.size() != suite.size()) return Outcome{false, "covering runs missing"};
    return oracle_agreement(suite, covering_reports);
  });
  guarded(11, "determinism", [&] { return determinism(suite); });
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
