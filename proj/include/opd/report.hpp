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

// Run driver and invariant checker. run() executes an engine, records state
// snapshots, then derives rows, summary and checks from the snapshots with the
// same code check() uses on a stored report.

#ifndef OPD_REPORT_HPP_
#define OPD_REPORT_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "opd/instance_io.hpp"

namespace opd {

struct RunOptions {
  std::string mode;  // covering mode, "packing" or "auction"; empty picks a default
  std::optional<double> rho;
  std::uint64_t seed = 0;
  bool trace = false;
  bool oracle = true;
  // eta_factor, step_rel, tol_feas, max_steps, L (one value or comma list)
  std::map<std::string, std::string> params;
};

enum class CheckState { kPass, kFail, kSkip };

const char* check_state_name(CheckState s);

struct CheckResult {
  std::string name;
  CheckState state = CheckState::kPass;
  double margin = 0.0;  // worst observed margin; negative beyond tolerance fails
  std::string detail;
};

struct RunReport {
  std::string kind;
  std::string mode;
  std::string status = "ok";  // ok | unbounded
  std::string message;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<CheckResult> checks;
  nlohmann::json record;  // parameters, snapshots and oracle output
};

std::string default_mode(const InstanceFile& instance);

RunReport run(const InstanceFile& instance, const RunOptions& options);

// Re-derives every check from the report's snapshots.
std::vector<CheckResult> check(const InstanceFile& instance, const RunReport& report);

std::string report_json(const RunReport& report);
RunReport parse_report(const std::string& text);
std::string report_csv(const RunReport& report);
std::string summary_block(const RunReport& report);

// 0 ok, 2 invariant failure, 3 unbounded, 4 oracle disagreement.
int exit_code(const RunReport& report);
int exit_code(const std::vector<CheckResult>& checks, const std::string& status);

std::string format_real(double v);

}  // namespace opd

#endif  // OPD_REPORT_HPP_
