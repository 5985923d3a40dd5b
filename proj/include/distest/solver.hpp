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

// Fidelity-minimization SDPs: assembly from a scenario and a Bell value,
// solving, and sweeps over a grid of Bell values.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "distest/fidelity.hpp"
#include "distest/ncpoly.hpp"
#include "distest/relaxation.hpp"
#include "distest/sdp.hpp"
#include "distest/strategy.hpp"

namespace distest {

enum class ScenarioKind { Chsh, Tilted };

struct Scenario {
  ScenarioKind kind = ScenarioKind::Chsh;
  TiltedParameters tilted;  // meaningful for Tilted only
  Alphabet alphabet;
  OperatorPolynomial functional;
  FidelityFunctional fidelity;
  double local_bound = 0.0;
  double quantum_bound = 0.0;
  /// Residual tolerance used unless the caller picks one: 1e-8, or 1e-6 for
  /// the larger tilted blocks.
  double default_tolerance = 1e-8;

  static Scenario chsh();
  static Scenario tilted_chsh(double theta);

  std::string describe() const;
  /// Level-3 sequence for CHSH, the 41-word sequence for tilted CHSH.
  SequenceSet default_sequence() const;
};

enum class ConstraintMode {
  ValueEquals,      // Bell form = beta
  ValueAtLeast,     // Bell form >= beta
  FullCorrelation,  // all one- and two-letter correlators of a target strategy
};

std::string to_string(ConstraintMode mode);
ConstraintMode parse_constraint_mode(const std::string& text);

struct AssembleOptions {
  std::optional<int> level;              // build_level_sequence(level) instead of the default
  std::optional<SequenceSet> sequence;   // explicit moment sequence, wins over level
  std::optional<SequenceSet> localizing_sequence;  // defaults to the moment sequence
  SecondLocalizer second_localizer = SecondLocalizer::B4;
  /// Also require the localized operators' anti-Hermitian moments to vanish,
  /// as they do for any PSD operator.
  bool localizer_hermiticity = true;
  /// Box moments that only localizing matrices mention to [-1, 1], as every
  /// word of unitaries has norm 1. The moment matrix already bounds the rest.
  bool bound_localizer_moments = true;
  /// Bell-value constraints (and FullCorrelation pins) hold to within this
  /// much. At the maximal violation the exact constraint leaves the feasible
  /// set without interior; the window restores one and can only lower the
  /// bound. 0 imposes exact equalities.
  double value_window = 1e-7;
  std::optional<QuantumStrategy> target;  // required by FullCorrelation
};

/// Throws InvalidParameter when beta lies outside [L, Q] or FullCorrelation
/// lacks a matching target, SequenceContainment when the objective or Bell
/// form uses a moment that no PSD block contains.
SdpProblem assemble(const Scenario& scenario, double beta, ConstraintMode mode,
                    const AssembleOptions& options = {});

/// Moments of `s` laid out in the variable order of `problem`.
Eigen::VectorXd moment_vector(const SdpProblem& problem, const Scenario& scenario,
                              const QuantumStrategy& s);

struct SweepPoint {
  double beta = 0.0;
  double fidelity = 0.0;
  SolveReport report;
  std::string error;  // set when assembly or solving threw
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::string scenario;
  std::string sequence;
};

struct SweepOptions {
  AssembleOptions assemble;
  SolverOptions solver;
  int workers = 1;
};

/// `steps` evenly spaced values from lo to hi inclusive (just lo when steps == 1).
std::vector<double> linear_grid(double lo, double hi, int steps);

/// The optimal strategy of the scenario mixed with white noise down to Bell
/// value beta.
QuantumStrategy reference_family_member(const Scenario& scenario, double beta);

/// One solve per grid value, results in grid order. The grid must be strictly
/// increasing and inside [L, Q]. FullCorrelation without a target pins the
/// correlators of reference_family_member at each beta.
SweepResult sweep(const Scenario& scenario, const std::vector<double>& grid,
                  ConstraintMode mode, const SweepOptions& options = {});

/// 1/2 + (1/2)(beta - b*)/(2 sqrt 2 - b*), b* = (16 + 14 sqrt 2)/17, clipped at 1/2.
double analytic_chsh_baseline(double beta);

}  // namespace distest
