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

#include "distest/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>

#include "distest/acceptance.hpp"
#include "distest/errors.hpp"

namespace distest::cli {
namespace {

constexpr double kQuarterPi = std::numbers::pi / 4;
constexpr double kSnapWindow = 1e-4;
constexpr double kRangeSlack = 1e-9;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

ScenarioKind parse_scenario(const std::string& name) {
  if (name == "chsh") return ScenarioKind::Chsh;
  if (name == "tilted") return ScenarioKind::Tilted;
  throw InvalidParameter("unknown scenario '" + name + "' (valid: chsh, tilted)");
}

void check_theta(double theta) {
  if (!(theta > 0.0 && theta <= kQuarterPi)) {
    throw InvalidParameter("theta " + general(theta) + " is outside the valid range (0, " +
                           general(kQuarterPi) + "]");
  }
}

AssembleOptions sequence_options(const std::string& preset, ScenarioKind kind) {
  AssembleOptions options;
  if (preset == "default") return options;
  for (int level = 1; level <= 3; ++level) {
    if (preset == "level-" + std::to_string(level)) {
      options.level = level;
      return options;
    }
  }
  if (preset == "tilted-41") {
    if (kind != ScenarioKind::Tilted) {
      throw InvalidParameter("sequence tilted-41 needs the tilted scenario");
    }
    options.sequence = tilted_sequence();
    return options;
  }
  throw InvalidParameter("unknown sequence '" + preset +
                         "' (valid: default, level-1, level-2, level-3, tilted-41)");
}

std::vector<double> thetas_of(const RunConfig& config) {
  if (config.scenario == ScenarioKind::Chsh) return {0.0};
  if (config.theta) return {snap_theta(*config.theta)};
  return default_thetas();
}

std::string output_for(const RunConfig& config, double theta, bool several) {
  if (!several) return config.output;
  const std::filesystem::path path(config.output);
  const std::string name =
      path.stem().string() + "_theta" + fixed(theta, 4) + path.extension().string();
  return (path.parent_path() / name).string();
}

std::string script_path(const std::string& csv_path) {
  return std::filesystem::path(csv_path).replace_extension(".gp").string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  file << text;
  if (!file) throw InvalidParameter("cannot write " + path);
}

// Flat `key = value` lines become `--key=value` flags placed ahead of the
// command-line flags, which therefore win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::vector<std::string> injected;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw InvalidParameter("--config needs a file name");
      path = args[++i];
    } else if (args[i].starts_with("--config=")) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
      continue;
    }
    if (!std::filesystem::exists(path)) throw InvalidParameter("config file " + path + " not found");
    for (const auto& item : CLI::ConfigINI().from_file(path)) {
      if (!item.parents.empty() || item.inputs.empty()) {
        throw InvalidParameter("config file " + path + ": expected flat `key = value` lines");
      }
      std::string key = item.name;
      std::replace(key.begin(), key.end(), '_', '-');
      injected.push_back("--" + key + "=" + item.inputs.front());
    }
  }
  if (injected.empty()) return out;
  // Insert right after the subcommand name.
  auto at = std::find_if(out.begin(), out.end(), [](const std::string& a) { return !a.starts_with("-"); });
  if (at != out.end()) ++at;
  out.insert(at, injected.begin(), injected.end());
  return out;
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto jobs = plan_sweeps(config);
  bool all_optimal = true;
  for (const auto& job : jobs) {
    const auto result = sweep(job.scenario, job.grid, config.mode, job.options);
    write_file(job.output, format_csv(job.scenario, result, config.timings));
    write_file(script_path(job.output), gnuplot_script(job.scenario, job.output));
    int optimal = 0;
    for (const auto& p : result.points) {
      if (p.error.empty() && p.report.status == SolveStatus::Optimal) {
        ++optimal;
        continue;
      }
      all_optimal = false;
      err << "beta " << general(p.beta) << ": "
          << (p.error.empty() ? to_string(p.report.status) : "error") << " ("
          << (p.error.empty() ? p.report.message : p.error) << ")\n";
      if (p.error.empty() && p.report.status == SolveStatus::Infeasible &&
          config.mode == ConstraintMode::ValueEquals) {
        err << "  the exact Bell value is infeasible for this relaxation; --mode at-least "
               "asks only for a violation of at least beta\n";
      }
    }
    out << "wrote " << job.output << " (" << result.points.size() << " points, " << optimal
        << " optimal; " << job.scenario.describe() << ", sequence " << result.sequence << ")\n";
  }
  return all_optimal ? 0 : 1;
}

int cmd_simulate(const std::string& scenario_name, std::optional<double> theta, double visibility,
                 std::ostream& out, std::ostream& err) {
  const auto kind = parse_scenario(scenario_name);
  if (kind == ScenarioKind::Chsh && theta) {
    throw InvalidParameter("theta applies to the tilted scenario only");
  }
  const double angle = theta ? snap_theta(*theta) : kQuarterPi;
  if (kind == ScenarioKind::Tilted) check_theta(angle);
  const Scenario scenario = resolve_scenario(kind, angle);
  const QuantumStrategy optimal = kind == ScenarioKind::Chsh ? chsh_optimal_strategy()
                                                             : tilted_optimal_strategy(angle);
  const QuantumStrategy s = with_visibility(optimal, visibility);
  const Eigen::VectorXd reference = kind == ScenarioKind::Chsh
                                        ? chsh_reference_vector()
                                        : tilted_reference_vector(angle);

  const double beta = bell_value(s, scenario.functional);
  const double direct = state_overlap(s, reference);
  const double di = evaluate_fidelity(scenario.fidelity, s);
  const double expected_beta = visibility * scenario.quantum_bound;

  out << "scenario " << scenario.describe() << "\n";
  out << "visibility " << general(visibility) << "\n";
  out << "beta " << fixed(beta, 12) << "\n";
  out << "fidelity " << fixed(direct, 12) << "\n";
  out << "di_fidelity " << fixed(di, 12) << "\n";

  int code = 0;
  if (std::abs(di - direct) > 1e-10) {
    err << "fidelity functional disagrees with the direct overlap by " << general(di - direct)
        << " (allowed 1e-10)\n";
    code = 1;
  }
  if (std::abs(beta - expected_beta) > 1e-10) {
    err << "Bell value differs from visibility * Q = " << general(expected_beta) << "\n";
    code = 1;
  }
  return code;
}

}  // namespace

std::vector<double> default_thetas() {
  return {std::numbers::pi / 8, std::numbers::pi / 6, std::numbers::pi / 4};
}

double snap_theta(double theta) {
  if (theta > kQuarterPi && theta <= kQuarterPi + kSnapWindow) return kQuarterPi;
  return theta;
}

Scenario resolve_scenario(ScenarioKind kind, double theta) {
  return kind == ScenarioKind::Chsh ? Scenario::chsh() : Scenario::tilted_chsh(theta);
}

void validate(const RunConfig& config) {
  if (config.scenario == ScenarioKind::Chsh && config.theta) {
    throw InvalidParameter("theta applies to the tilted scenario only");
  }
  if (config.theta) check_theta(snap_theta(*config.theta));
  if (config.beta_steps < 1) {
    throw InvalidParameter("beta-steps must be >= 1 (got " + std::to_string(config.beta_steps) +
                           ")");
  }
  if (config.workers < 1) {
    throw InvalidParameter("workers must be >= 1 (got " + std::to_string(config.workers) + ")");
  }
  if (config.tolerance && !(*config.tolerance > 0.0 && *config.tolerance < 1.0)) {
    throw InvalidParameter("tolerance must lie in (0, 1) (got " + general(*config.tolerance) +
                           ")");
  }
  if (config.output.empty()) throw InvalidParameter("output path must not be empty");
  sequence_options(config.sequence, config.scenario);

  for (double theta : thetas_of(config)) {
    const Scenario scenario = resolve_scenario(config.scenario, theta);
    const double lo = config.beta_min.value_or(scenario.local_bound);
    const double hi = config.beta_max.value_or(scenario.quantum_bound);
    for (double b : {lo, hi}) {
      if (!(b >= scenario.local_bound - kRangeSlack && b <= scenario.quantum_bound + kRangeSlack)) {
        throw InvalidParameter("beta " + general(b) + " is outside the valid range [" +
                               general(scenario.local_bound) + ", " +
                               general(scenario.quantum_bound) + "] for " +
                               scenario.describe());
      }
    }
    if (config.beta_steps == 1 ? lo > hi : !(lo < hi)) {
      throw InvalidParameter("beta-min " + general(lo) + " must be below beta-max " + general(hi) +
                             (config.beta_steps == 1 ? "" : " when beta-steps > 1"));
    }
  }
}

std::vector<SweepJob> plan_sweeps(const RunConfig& config) {
  validate(config);
  const auto thetas = thetas_of(config);
  std::vector<SweepJob> jobs;
  for (double theta : thetas) {
    SweepJob job;
    job.scenario = resolve_scenario(config.scenario, theta);
    const double lo = config.beta_min.value_or(job.scenario.local_bound);
    const double hi = config.beta_max.value_or(job.scenario.quantum_bound);
    job.grid = linear_grid(lo, hi, config.beta_steps);
    job.options.assemble = sequence_options(config.sequence, config.scenario);
    job.options.solver.tolerance = config.tolerance.value_or(job.scenario.default_tolerance);
    job.options.workers = config.workers;
    job.output = output_for(config, theta, thetas.size() > 1);
    // Containment problems are configuration errors, not solver failures.
    AssembleOptions probe = job.options.assemble;
    if (config.mode == ConstraintMode::FullCorrelation) {
      probe.target = reference_family_member(job.scenario, job.grid.front());
    }
    assemble(job.scenario, job.grid.front(), config.mode, probe);
    jobs.push_back(std::move(job));
  }
  return jobs;
}

std::string format_csv(const Scenario& scenario, const SweepResult& result, bool timings) {
  std::string csv = std::string(kCsvHeader) + "\n";
  for (const auto& p : result.points) {
    csv += fixed(p.beta, 9) + ",";
    csv += (std::isnan(p.fidelity) ? std::string("nan") : fixed(p.fidelity, 9)) + ",";
    if (scenario.kind == ScenarioKind::Chsh) csv += fixed(analytic_chsh_baseline(p.beta), 9);
    csv += ",";
    csv += p.error.empty() ? to_string(p.report.status) : std::string("Error");
    csv += ",";
    if (timings) csv += fixed(p.report.runtime_seconds, 3);
    csv += "\n";
  }
  return csv;
}

std::string gnuplot_script(const Scenario& scenario, const std::string& csv_path) {
  const std::filesystem::path csv(csv_path);
  const std::string data = csv.filename().string();
  const std::string image = std::filesystem::path(csv).replace_extension(".png").filename().string();
  std::string gp;
  gp += "# " + scenario.describe() + "\n";
  gp += "set datafile separator ','\n";
  gp += "set key left top\n";
  gp += "set xlabel 'Bell value'\n";
  gp += "set ylabel 'fidelity lower bound'\n";
  gp += "set grid\n";
  gp += "set terminal pngcairo size 800,600\n";
  gp += "set output '" + image + "'\n";
  gp += "plot '" + data + "' every ::1 using 1:2 with linespoints title 'SDP bound'";
  if (scenario.kind == ScenarioKind::Chsh) {
    gp += ", \\\n     '' every ::1 using 1:3 with lines dashtype 2 title 'analytic baseline'";
  }
  gp += "\n";
  return gp;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Device-independent fidelity lower bounds from NPA relaxations", "distest"};
  app.require_subcommand(1);

  RunConfig config;
  std::string scenario_name = "chsh";
  std::string mode_name = "equals";
  std::optional<double> single_beta;

  auto* sweep_cmd = app.add_subcommand("sweep", "Solve a grid of Bell values and write a CSV");
  sweep_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sweep_cmd->add_option("--scenario", scenario_name, "chsh or tilted")
      ->check(CLI::IsMember({"chsh", "tilted"}));
  sweep_cmd->add_option("--theta", config.theta,
                        "Tilted state angle in (0, pi/4]; omitted sweeps pi/8, pi/6 and pi/4");
  sweep_cmd->add_option("--beta-min", config.beta_min, "Smallest Bell value (default: local bound)");
  sweep_cmd->add_option("--beta-max", config.beta_max,
                        "Largest Bell value (default: quantum bound)");
  sweep_cmd->add_option("--beta-steps", config.beta_steps, "Number of grid points");
  sweep_cmd->add_option("--beta", single_beta, "Solve at this single Bell value");
  sweep_cmd->add_option("--mode", mode_name, "equals, at-least or full-correlation")
      ->check(CLI::IsMember({"equals", "at-least", "full-correlation"}));
  sweep_cmd->add_option("--sequence", config.sequence,
                        "default, level-1, level-2, level-3 or tilted-41");
  sweep_cmd->add_option("--tolerance", config.tolerance,
                        "Residual tolerance (default 1e-8 for chsh, 1e-6 for tilted)");
  sweep_cmd->add_option("--workers", config.workers, "Parallel solves");
  sweep_cmd->add_option("--output,-o", config.output, "CSV path; a .gp script is written beside it");
  sweep_cmd->add_flag("--timings", config.timings, "Fill the runtime_s column");
  sweep_cmd->footer("Options may also come from --config FILE with flat `key = value` lines.");

  std::string sim_scenario = "chsh";
  std::optional<double> sim_theta;
  double visibility = 1.0;
  auto* simulate_cmd = app.add_subcommand("simulate", "Evaluate an explicit reference strategy");
  simulate_cmd->add_option("--scenario", sim_scenario, "chsh or tilted")
      ->check(CLI::IsMember({"chsh", "tilted"}));
  simulate_cmd->add_option("--theta", sim_theta, "Tilted state angle in (0, pi/4]");
  simulate_cmd->add_option("--visibility,-v", visibility, "White-noise visibility in [0, 1]");

  AcceptanceOptions acceptance;
  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance suite");
  verify_cmd->add_option("--only", acceptance.only, "Groups or criterion numbers to run");
  verify_cmd->add_option("--golden-dir", acceptance.golden_dir, "Directory of transcribed oracles");

  std::string dump_scenario = "chsh";
  std::optional<double> dump_theta;
  std::optional<double> dump_beta;
  std::string dump_mode = "equals";
  std::string dump_sequence = "default";
  std::string dump_output;
  auto* dump_cmd = app.add_subcommand("dump", "Write one problem in sparse SDPA format");
  dump_cmd->add_option("--scenario", dump_scenario, "chsh or tilted")
      ->check(CLI::IsMember({"chsh", "tilted"}));
  dump_cmd->add_option("--theta", dump_theta, "Tilted state angle in (0, pi/4]");
  dump_cmd->add_option("--beta", dump_beta, "Bell value (default: quantum bound)");
  dump_cmd->add_option("--mode", dump_mode, "equals or at-least")
      ->check(CLI::IsMember({"equals", "at-least"}));
  dump_cmd->add_option("--sequence", dump_sequence, "default, level-1, level-2, level-3 or tilted-41");
  dump_cmd->add_option("--output,-o", dump_output, "Output path (default: standard output)");

  std::vector<std::string> args;
  try {
    args = expand_config(std::vector<std::string>(argv + 1, argv + argc));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sweep_cmd->parsed()) {
      config.scenario = parse_scenario(scenario_name);
      config.mode = parse_constraint_mode(mode_name);
      if (single_beta) {
        if (config.beta_min || config.beta_max) {
          throw InvalidParameter("--beta cannot be combined with --beta-min or --beta-max");
        }
        config.beta_min = config.beta_max = *single_beta;
        config.beta_steps = 1;
      }
      plan_sweeps(config);  // usage errors surface before any solve
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sweep_cmd->parsed()) return cmd_sweep(config, out, err);
    if (simulate_cmd->parsed()) {
      return cmd_simulate(sim_scenario, sim_theta, visibility, out, err);
    }
    if (verify_cmd->parsed()) {
      const auto results = run_acceptance(acceptance);
      print_report(out, results);
      return std::all_of(results.begin(), results.end(),
                         [](const CriterionResult& r) { return r.passed; })
                 ? 0
                 : 1;
    }
    if (dump_cmd->parsed()) {
      const auto kind = parse_scenario(dump_scenario);
      if (kind == ScenarioKind::Chsh && dump_theta) {
        throw InvalidParameter("theta applies to the tilted scenario only");
      }
      const double angle = dump_theta ? snap_theta(*dump_theta) : kQuarterPi;
      if (kind == ScenarioKind::Tilted) check_theta(angle);
      const Scenario scenario = resolve_scenario(kind, angle);
      const auto problem =
          assemble(scenario, dump_beta.value_or(scenario.quantum_bound),
                   parse_constraint_mode(dump_mode), sequence_options(dump_sequence, kind));
      const std::string text = to_sdpa(problem);
      if (dump_output.empty()) {
        out << text;
      } else {
        write_file(dump_output, text);
      }
      return 0;
    }
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace distest::cli
