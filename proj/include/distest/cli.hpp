// Copyright 2026 The distest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: sweep, simulate, verify and dump.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "distest/solver.hpp"

namespace distest::cli {

struct RunConfig {
  ScenarioKind scenario = ScenarioKind::Chsh;
  std::optional<double> theta;  // tilted only; unset sweeps default_thetas()
  std::optional<double> beta_min;  // defaults to the local bound
  std::optional<double> beta_max;  // defaults to the quantum bound
  int beta_steps = 21;
  ConstraintMode mode = ConstraintMode::ValueEquals;
  /// "default", "level-1", "level-2", "level-3" or "tilted-41".
  std::string sequence = "default";
  std::optional<double> tolerance;  // defaults to Scenario::default_tolerance
  int workers = 1;
  std::string output = "fidelity.csv";
  bool timings = false;
};

/// pi/8, pi/6, pi/4.
std::vector<double> default_thetas();

/// Angles in (pi/4, pi/4 + 1e-4] become pi/4, so that a rounded 0.7854 on the
/// command line still means the maximally entangled member.
double snap_theta(double theta);

Scenario resolve_scenario(ScenarioKind kind, double theta);

/// Throws InvalidParameter naming the violated precondition and valid range.
void validate(const RunConfig& config);

struct SweepJob {
  Scenario scenario;
  std::vector<double> grid;
  SweepOptions options;
  std::string output;  // CSV path
};

/// One job per angle (one for CHSH). Validates first.
std::vector<SweepJob> plan_sweeps(const RunConfig& config);

inline constexpr const char* kCsvHeader = "beta,fidelity,baseline,status,runtime_s";

std::string format_csv(const Scenario& scenario, const SweepResult& result, bool timings);

/// Gnuplot script plotting `csv_path` (and the baseline column for CHSH).
std::string gnuplot_script(const Scenario& scenario, const std::string& csv_path);

/// Entry point; returns the process exit code (0 success, 1 solver or check
/// failure, 2 usage error).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace distest::cli
