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

#include "distest/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <set>
#include <thread>

#include "distest/errors.hpp"

namespace distest {
namespace {

// Bell values computed along different routes differ in the last bits.
constexpr double kRangeSlack = 1e-9;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void check_beta(const Scenario& scenario, double beta) {
  if (!std::isfinite(beta) || beta < scenario.local_bound - kRangeSlack ||
      beta > scenario.quantum_bound + kRangeSlack) {
    throw InvalidParameter("Bell value " + format_number(beta) + " is outside [" +
                           format_number(scenario.local_bound) + ", " +
                           format_number(scenario.quantum_bound) + "] for " +
                           scenario.describe());
  }
}

LinearForm to_linear_form(const OperatorPolynomial& p, const VariableIndex& variables,
                          const std::string& what) {
  LinearForm form;
  const OperatorPolynomial keyed = key_form(p);
  for (const auto& [m, c] : keyed.terms()) {
    const auto id = variables.find(MomentKey{m});
    if (!id) {
      throw SequenceContainment(what + " uses moment " + to_string(m) +
                                ", which no PSD block contains; enlarge the operator sequence");
    }
    form.terms.emplace_back(*id, c);
  }
  return form;
}

PsdBlock moment_block(const MomentMatrixSkeleton& skeleton) {
  const auto n = skeleton.dimension();
  PsdBlock block;
  block.name = "moment";
  block.constant = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      block.entries.push_back({static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j),
                               skeleton.variables.at(skeleton.key(i, j)), 1.0});
    }
  }
  return block;
}

PsdBlock localizing_block(const LocalizingSkeleton& skeleton, const VariableIndex& variables,
                          std::string name) {
  const auto n = skeleton.dimension();
  PsdBlock block;
  block.name = std::move(name);
  block.constant = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      for (const auto& [m, c] : skeleton.entry(i, j).terms()) {
        block.entries.push_back({static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j),
                                 variables.at(MomentKey{m}), c});
      }
    }
  }
  return block;
}

// Letters whose single and pairwise correlators FullCorrelation pins.
std::vector<Monomial> observed_correlators() {
  std::vector<Monomial> out;
  for (std::uint8_t x = 1; x <= 2; ++x) out.emplace_back(Monomial::Word{x}, Monomial::Word{});
  for (std::uint8_t y = 1; y <= 2; ++y) out.emplace_back(Monomial::Word{}, Monomial::Word{y});
  for (std::uint8_t x = 1; x <= 2; ++x) {
    for (std::uint8_t y = 1; y <= 2; ++y) out.emplace_back(Monomial::Word{x}, Monomial::Word{y});
  }
  return out;
}

}  // namespace

Scenario Scenario::chsh() {
  Scenario s;
  s.kind = ScenarioKind::Chsh;
  s.alphabet = Alphabet::chsh();
  s.functional = chsh_functional();
  s.fidelity = chsh_fidelity();
  s.local_bound = 2.0;
  s.quantum_bound = 2.0 * std::numbers::sqrt2;
  return s;
}

Scenario Scenario::tilted_chsh(double theta) {
  Scenario s;
  s.kind = ScenarioKind::Tilted;
  s.tilted = TiltedParameters::from_theta(theta);
  s.alphabet = Alphabet::tilted();
  s.functional = tilted_functional(s.tilted.alpha);
  s.fidelity = tilted_fidelity(theta);
  s.local_bound = s.tilted.local_bound();
  s.quantum_bound = s.tilted.quantum_bound();
  s.default_tolerance = 1e-6;
  return s;
}

std::string Scenario::describe() const {
  if (kind == ScenarioKind::Chsh) return "chsh";
  return "tilted theta=" + format_number(tilted.theta) + " alpha=" + format_number(tilted.alpha);
}

SequenceSet Scenario::default_sequence() const {
  return kind == ScenarioKind::Chsh ? build_level_sequence(3, alphabet) : tilted_sequence();
}

std::string to_string(ConstraintMode mode) {
  switch (mode) {
    case ConstraintMode::ValueEquals:
      return "equals";
    case ConstraintMode::ValueAtLeast:
      return "at-least";
    case ConstraintMode::FullCorrelation:
      return "full-correlation";
  }
  return "equals";
}

ConstraintMode parse_constraint_mode(const std::string& text) {
  for (auto mode : {ConstraintMode::ValueEquals, ConstraintMode::ValueAtLeast,
                    ConstraintMode::FullCorrelation}) {
    if (text == to_string(mode)) return mode;
  }
  throw InvalidParameter("unknown constraint mode '" + text +
                         "'; expected equals, at-least or full-correlation");
}

SdpProblem assemble(const Scenario& scenario, double beta, ConstraintMode mode,
                    const AssembleOptions& options) {
  check_beta(scenario, beta);

  SequenceSet sequence = options.sequence          ? *options.sequence
                         : options.level           ? build_level_sequence(*options.level,
                                                                          scenario.alphabet)
                                                   : scenario.default_sequence();
  for (const auto& m : sequence) {
    for (const auto& letter : m.letters()) {
      if (!scenario.alphabet.contains(letter)) {
        throw InvalidLetter("sequence word " + to_string(m) + " uses a letter outside " +
                            scenario.describe());
      }
    }
  }

  MomentMatrixSkeleton skeleton = build_moment_skeleton(sequence);
  std::vector<PsdBlock> localizers;
  std::vector<OperatorPolynomial> hermiticity;
  if (scenario.kind == ScenarioKind::Tilted) {
    const SequenceSet& sprime =
        options.localizing_sequence ? *options.localizing_sequence : sequence;
    const double mu = scenario.tilted.mu;
    const auto first = build_localizing_skeleton(first_bob_localizer(mu), sprime, skeleton);
    const auto second = build_localizing_skeleton(
        second_bob_localizer(mu, options.second_localizer), sprime, skeleton);
    localizers.push_back(localizing_block(first, skeleton.variables, "localizing-1"));
    localizers.push_back(localizing_block(second, skeleton.variables, "localizing-2"));
    if (options.localizer_hermiticity) {
      for (const auto* skel : {&first, &second}) {
        for (const auto& form : skel->hermiticity_forms) hermiticity.push_back(form);
      }
    }
  }
  const VariableIndex& variables = skeleton.variables;

  SdpProblem problem;
  problem.num_variables = static_cast<int>(variables.size());
  for (const auto& key : variables.keys()) problem.variable_names.push_back(to_string(key));
  problem.psd_blocks.push_back(moment_block(skeleton));
  for (auto& block : localizers) problem.psd_blocks.push_back(std::move(block));

  problem.objective = to_linear_form(scenario.fidelity.polynomial, variables, "the fidelity objective");
  const LinearForm bell = to_linear_form(scenario.functional, variables, "the Bell functional");

  LinearEquality normalization;
  normalization.form.terms.emplace_back(variables.at(moment_key(Monomial{})), 1.0);
  normalization.rhs = 1.0;
  problem.equalities.push_back(normalization);

  if (options.bound_localizer_moments) {
    std::vector<bool> in_moment(variables.size(), false);
    for (const auto& key : skeleton.entry_keys) in_moment[static_cast<std::size_t>(variables.at(key))] = true;
    for (std::size_t v = 0; v < variables.size(); ++v) {
      if (in_moment[v]) continue;
      for (double sign : {1.0, -1.0}) {
        LinearForm side;
        side.terms.emplace_back(static_cast<int>(v), sign);
        side.constant = 1.0;
        problem.nonnegative.push_back(std::move(side));
      }
    }
  }

  // Many forms repeat up to scale; keep one per direction.
  std::set<std::string> seen;
  for (const auto& form : hermiticity) {
    const double lead = form.terms().begin()->second;
    const OperatorPolynomial unit = (1.0 / lead) * form;
    if (!seen.insert(to_string(unit)).second) continue;
    LinearEquality eq;
    for (const auto& [m, c] : unit.terms()) eq.form.terms.emplace_back(variables.at(MomentKey{m}), c);
    problem.equalities.push_back(std::move(eq));
  }

  const double window = options.value_window;
  if (!(window >= 0.0)) {
    throw InvalidParameter("value window must be >= 0 (got " + format_number(window) + ")");
  }
  // form = value, or value - window <= form <= value + window.
  auto pin = [&](const LinearForm& form, double value) {
    if (window == 0.0) {
      problem.equalities.push_back({form, value});
      return;
    }
    LinearForm above = form;
    above.constant += window - value;
    LinearForm below;
    for (const auto& [id, c] : form.terms) below.terms.emplace_back(id, -c);
    below.constant = value + window - form.constant;
    problem.nonnegative.push_back(std::move(above));
    problem.nonnegative.push_back(std::move(below));
  };

  switch (mode) {
    case ConstraintMode::ValueEquals:
      pin(bell, beta);
      break;
    case ConstraintMode::ValueAtLeast: {
      LinearForm excess = bell;
      excess.constant += window - beta;
      problem.nonnegative.push_back(std::move(excess));
      break;
    }
    case ConstraintMode::FullCorrelation: {
      if (!options.target) {
        throw InvalidParameter("full-correlation mode needs a target strategy");
      }
      const double target_beta = bell_value(*options.target, scenario.functional);
      if (std::abs(target_beta - beta) > 1e-9) {
        throw InvalidParameter("target strategy has Bell value " + format_number(target_beta) +
                               " but the requested value is " + format_number(beta) +
                               "; they must agree within 1e-9");
      }
      for (const auto& m : observed_correlators()) {
        const auto id = variables.find(moment_key(m));
        if (!id) {
          throw SequenceContainment("correlator " + to_string(m) +
                                    " is not contained in the moment matrix");
        }
        LinearForm correlator;
        correlator.terms.emplace_back(*id, 1.0);
        pin(correlator, evaluate_word(*options.target, m));
      }
      break;
    }
  }
  return problem;
}

Eigen::VectorXd moment_vector(const SdpProblem& problem, const Scenario& scenario,
                              const QuantumStrategy& s) {
  std::set<MomentKey> keys;
  std::vector<MomentKey> ordered;
  for (const auto& name : problem.variable_names) {
    ordered.push_back(moment_key(parse_monomial(name, scenario.alphabet)));
    keys.insert(ordered.back());
  }
  const auto values = populate_moments(s, keys);
  Eigen::VectorXd y(static_cast<Eigen::Index>(ordered.size()));
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = values.at(ordered[i]);
  }
  return y;
}

std::vector<double> linear_grid(double lo, double hi, int steps) {
  if (steps < 1) {
    throw InvalidParameter("grid needs at least 1 step (got " + std::to_string(steps) + ")");
  }
  if (steps == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
  }
  out.back() = hi;
  return out;
}

SweepResult sweep(const Scenario& scenario, const std::vector<double>& grid, ConstraintMode mode,
                  const SweepOptions& options) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    check_beta(scenario, grid[i]);
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InvalidParameter("Bell values of a sweep must be strictly increasing");
    }
  }
  if (options.workers < 1) {
    throw InvalidParameter("worker count must be >= 1 (got " + std::to_string(options.workers) +
                           ")");
  }

  SweepResult result;
  result.scenario = scenario.describe();
  if (options.assemble.sequence) {
    result.sequence = "custom(" + std::to_string(options.assemble.sequence->size()) + ")";
  } else if (options.assemble.level) {
    result.sequence = "level-" + std::to_string(*options.assemble.level);
  } else {
    result.sequence = scenario.kind == ScenarioKind::Chsh ? "level-3" : "tilted-41";
  }
  result.points.resize(grid.size());

  std::atomic<std::size_t> next{0};
  const auto work = [&]() {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      auto& point = result.points[i];
      point.beta = grid[i];
      try {
        AssembleOptions assemble_options = options.assemble;
        if (mode == ConstraintMode::FullCorrelation && !assemble_options.target) {
          assemble_options.target = reference_family_member(scenario, grid[i]);
        }
        const SdpProblem problem = assemble(scenario, grid[i], mode, assemble_options);
        point.report = solve(problem, options.solver);
        point.fidelity = point.report.bound;
      } catch (const std::exception& e) {
        point.error = e.what();
        point.report.status = SolveStatus::NumericalTrouble;
        point.report.message = e.what();
        point.fidelity = std::numeric_limits<double>::quiet_NaN();
      }
    }
  };
  const auto count =
      static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(options.workers),
                                                     std::max<std::size_t>(grid.size(), 1)));
  if (count <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(work);
  }
  return result;
}

QuantumStrategy reference_family_member(const Scenario& scenario, double beta) {
  check_beta(scenario, beta);
  const double v = std::min(1.0, beta / scenario.quantum_bound);
  if (scenario.kind == ScenarioKind::Chsh) return werner_strategy(v);
  return with_visibility(tilted_optimal_strategy(scenario.tilted.theta), v);
}

double analytic_chsh_baseline(double beta) {
  const double q = 2.0 * std::numbers::sqrt2;
  if (!std::isfinite(beta) || beta < 2.0 - kRangeSlack || beta > q + kRangeSlack) {
    throw InvalidParameter("CHSH value " + format_number(beta) + " is outside [2, " +
                           format_number(q) + "]");
  }
  const double star = (16.0 + 14.0 * std::numbers::sqrt2) / 17.0;
  return std::max(0.5, 0.5 + 0.5 * (beta - star) / (q - star));
}

}  // namespace distest
