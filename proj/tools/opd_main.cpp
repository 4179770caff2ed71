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

// opd: gen | run | oracle | check.

#include <glob.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "opd/error.hpp"
#include "opd/generators.hpp"
#include "opd/instance_io.hpp"
#include "opd/kernels.hpp"
#include "opd/offline.hpp"
#include "opd/report.hpp"

namespace {

constexpr int kExitError = 1;

std::map<std::string, std::string> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, std::string> out;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw opd::InvalidInstance("parameter '" + item + "' is not key=value");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("opd");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("OPD_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    opd::save_text(path, text);
  }
}

std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<std::string> out;
  if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  std::sort(out.begin(), out.end());
  return out;
}

struct RunArgs {
  std::string instance;
  std::string glob;
  std::string mode;
  std::optional<double> rho;
  std::uint64_t seed = 0;
  std::string out;
  std::string csv;
  bool trace = false;
  bool no_oracle = false;
  std::vector<std::string> params;
};

struct RunOutcome {
  std::string summary;
  int code = 0;
};

RunOutcome run_one(const std::string& path, const RunArgs& args, const std::string& out,
                   const std::string& csv) {
  opd::InstanceFile inst = opd::load_instance(path);
  opd::RunOptions opt;
  opt.mode = args.mode;
  opt.rho = args.rho;
  opt.seed = args.seed;
  opt.trace = args.trace;
  opt.oracle = !args.no_oracle;
  opt.params = parse_params(args.params);
  spdlog::info("running {} ({})", path, opt.mode.empty() ? opd::default_mode(inst) : opt.mode);
  opd::RunReport rep = opd::run(inst, opt);
  if (!out.empty()) opd::save_text(out, opd::report_json(rep));
  if (!csv.empty()) opd::save_text(csv, opd::report_csv(rep));
  for (const auto& c : rep.checks) {
    if (c.state == opd::CheckState::kFail) {
      spdlog::warn("{}: check {} failed (margin {}, {})", path, c.name, opd::format_real(c.margin),
                   c.detail);
    }
  }
  return {opd::summary_block(rep), opd::exit_code(rep)};
}

int severity(int code) {
  // Worst-first ordering for batch runs.
  switch (code) {
    case 0: return 0;
    case 3: return 1;
    case 4: return 2;
    case 2: return 3;
    default: return 4;
  }
}

int cmd_run(const RunArgs& args) {
  if (args.glob.empty()) {
    if (args.instance.empty()) throw opd::InvalidInstance("run needs --instance or --glob");
    RunOutcome o = run_one(args.instance, args, args.out, args.csv);
    std::cout << o.summary;
    return o.code;
  }
  std::vector<std::string> paths = expand_glob(args.glob);
  if (paths.empty()) throw opd::InvalidInstance("no files match '" + args.glob + "'");
  if (!args.out.empty()) std::filesystem::create_directories(args.out);
  if (!args.csv.empty()) std::filesystem::create_directories(args.csv);
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<RunOutcome> outcomes(paths.size());
  for (std::size_t start = 0; start < paths.size(); start += workers) {
    std::vector<std::future<RunOutcome>> batch;
    for (std::size_t i = start; i < std::min(paths.size(), start + workers); ++i) {
      const std::string stem = std::filesystem::path(paths[i]).stem().string();
      std::string out = args.out.empty() ? "" : args.out + "/" + stem + ".report.json";
      std::string csv = args.csv.empty() ? "" : args.csv + "/" + stem + ".csv";
      batch.push_back(std::async(std::launch::async, [&, i, out, csv]() {
        try {
          return run_one(paths[i], args, out, csv);
        } catch (const std::exception& e) {
          return RunOutcome{"status=error\nmessage=" + std::string(e.what()) + "\n", kExitError};
        }
      }));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) outcomes[start + i] = batch[i].get();
  }
  int code = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::cout << "instance=" << paths[i] << "\n" << outcomes[i].summary << "\n";
    if (severity(outcomes[i].code) > severity(code)) code = outcomes[i].code;
  }
  return code;
}

int cmd_oracle(const std::string& path, std::uint64_t seed) {
  opd::InstanceFile inst = opd::load_instance(path);
  const std::uint64_t s = opd::instance_hash(inst) ^ seed;
  opd::OracleResult r;
  switch (inst.kind) {
    case opd::InstanceKind::kCovering: {
      opd::CoveringOracleSettings os;
      os.seed = s;
      r = opd::covering_opt(*opd::make_cost(inst), inst.rounds, os);
      break;
    }
    case opd::InstanceKind::kPacking:
      r = opd::packing_opt(*inst.polynomial, inst.rounds, s);
      break;
    case opd::InstanceKind::kAuction: {
      opd::AuctionPrepared prep = opd::prepare_auction(opd::to_auction(inst));
      r = opd::auction_opt(prep.fhat_star, prep.values, s);
      double shift = 0.0;
      for (double v : prep.shift) shift += v;
      std::cout << "value_shift=" << opd::format_real(shift) << "\n";
      break;
    }
  }
  std::cout << "kind=" << opd::kind_name(inst.kind) << "\n"
            << "value=" << opd::format_real(r.value) << "\n"
            << "status=" << opd::status_name(r.status) << "\n"
            << "kkt_residual=" << opd::format_real(r.kkt_residual) << "\n";
  if (r.grid_used) {
    std::cout << "descent_value=" << opd::format_real(r.descent_value) << "\n"
              << "grid_value=" << opd::format_real(r.grid_value) << "\n"
              << "grid_levels=" << r.grid_levels << "\n"
              << "grid_change=" << opd::format_real(r.grid_change) << "\n";
  }
  std::cout << "point=";
  for (std::size_t i = 0; i < r.point.size(); ++i) {
    std::cout << (i ? "," : "") << opd::format_real(r.point[i]);
  }
  std::cout << "\n";
  if (r.status == opd::OracleStatus::kUnbounded) return 3;
  if (r.status == opd::OracleStatus::kFailed) return 4;
  return 0;
}

int cmd_check(const std::string& instance_path, const std::string& report_path) {
  opd::InstanceFile inst = opd::load_instance(instance_path);
  opd::RunReport rep = opd::parse_report(opd::read_text(report_path));
  std::vector<opd::CheckResult> checks = opd::check(inst, rep);
  for (const auto& c : checks) {
    std::cout << c.name << "=" << opd::check_state_name(c.state)
              << " margin=" << opd::format_real(c.margin);
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
  }
  return opd::exit_code(checks, rep.status);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Online primal-dual covering, packing and auction engines"};
  app.require_subcommand(1);

  std::string family;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  std::vector<std::string> gen_params;
  CLI::App* gen = app.add_subcommand("gen", "Generate an instance file");
  gen->add_option("family", family, "Generator family")->required();
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--out", gen_out, "Output path (stdout if omitted)");
  gen->add_option("--param", gen_params, "Family parameter key=value");

  RunArgs ra;
  CLI::App* runc = app.add_subcommand("run", "Run an engine with invariant checks");
  runc->add_option("--instance", ra.instance, "Instance file");
  runc->add_option("--glob", ra.glob, "Batch: instance file pattern (runs concurrently)");
  runc->add_option("--mode", ra.mode,
                   "general | sharp | homogeneous | general-poly | lp | packing | auction");
  runc->add_option("--rho", ra.rho, "Override rho");
  runc->add_option("--seed", ra.seed, "Oracle seed offset");
  runc->add_option("--out", ra.out, "Report JSON path (directory with --glob)");
  runc->add_option("--csv", ra.csv, "Per-round CSV path (directory with --glob)");
  runc->add_flag("--trace", ra.trace, "Record chosen-bundle traces (auction)");
  runc->add_flag("--no-oracle", ra.no_oracle, "Skip the offline oracle");
  runc->add_option("--param", ra.params, "Engine parameter key=value");

  std::string oracle_instance;
  std::uint64_t oracle_seed = 0;
  CLI::App* orc = app.add_subcommand("oracle", "Offline optimum of an instance");
  orc->add_option("--instance", oracle_instance, "Instance file")->required();
  orc->add_option("--seed", oracle_seed, "Seed offset");

  std::string check_instance, check_report;
  CLI::App* chk = app.add_subcommand("check", "Re-validate a report against its instance");
  chk->add_option("--instance", check_instance, "Instance file")->required();
  chk->add_option("--report", check_report, "Report JSON")->required();

  CLI11_PARSE(app, argc, argv);
  spdlog::debug("kernel isa: {}", opd::kernels::isa_name(opd::kernels::active_isa()));
  try {
    if (*gen) {
      opd::InstanceFile inst = opd::generate(family, parse_params(gen_params), gen_seed);
      emit(gen_out, opd::serialize(inst));
      return 0;
    }
    if (*runc) return cmd_run(ra);
    if (*orc) return cmd_oracle(oracle_instance, oracle_seed);
    if (*chk) return cmd_check(check_instance, check_report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
