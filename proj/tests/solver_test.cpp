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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "distest/errors.hpp"
#include "distest/solver.hpp"

namespace distest {
namespace {

constexpr double kPi = std::numbers::pi;
const double kQ = 2.0 * std::numbers::sqrt2;

AssembleOptions exact() {
  AssembleOptions o;
  o.value_window = 0.0;
  return o;
}

void expect_feasible(const Scenario& scenario, const QuantumStrategy& s, ConstraintMode mode,
                     AssembleOptions options) {
  const double beta = bell_value(s, scenario.functional);
  if (mode == ConstraintMode::FullCorrelation) options.target = s;
  const SdpProblem p = assemble(scenario, beta, mode, options);
  const auto v = check_point(p, moment_vector(p, scenario, s));
  EXPECT_LE(v.equality, 1e-9) << scenario.describe() << " beta " << beta;
  EXPECT_GE(v.min_eigenvalue, -1e-9) << scenario.describe() << " beta " << beta;
  EXPECT_GE(v.min_slack, -1e-9) << scenario.describe() << " beta " << beta;
}

TEST(Scenario, Bounds) {
  const auto chsh = Scenario::chsh();
  EXPECT_DOUBLE_EQ(chsh.local_bound, 2.0);
  EXPECT_NEAR(chsh.quantum_bound, kQ, 1e-15);
  EXPECT_DOUBLE_EQ(chsh.default_tolerance, 1e-8);
  EXPECT_EQ(chsh.default_sequence().size(), 25u);

  const auto tilted = Scenario::tilted_chsh(kPi / 6);
  const double alpha = alpha_from_theta(kPi / 6);
  EXPECT_NEAR(tilted.local_bound, 2.0 + alpha, 1e-15);
  EXPECT_NEAR(tilted.quantum_bound, std::sqrt(8.0 + 2.0 * alpha * alpha), 1e-15);
  EXPECT_EQ(tilted.default_sequence().size(), 41u);
  EXPECT_THROW(Scenario::tilted_chsh(1.0), InvalidParameter);
}

TEST(Mode, TextRoundTrip) {
  for (auto mode : {ConstraintMode::ValueEquals, ConstraintMode::ValueAtLeast,
                    ConstraintMode::FullCorrelation}) {
    EXPECT_EQ(parse_constraint_mode(to_string(mode)), mode);
  }
  EXPECT_THROW(parse_constraint_mode("exactly"), InvalidParameter);
}

TEST(Assemble, ChshShapeWithExactEqualities) {
  const auto p = assemble(Scenario::chsh(), kQ, ConstraintMode::ValueEquals, exact());
  ASSERT_EQ(p.psd_blocks.size(), 1u);
  EXPECT_EQ(p.psd_blocks[0].dimension(), 25);
  EXPECT_EQ(p.equalities.size(), 2u);
  EXPECT_TRUE(p.nonnegative.empty());
}

TEST(Assemble, ChshWindowReplacesBellEquality) {
  const auto p = assemble(Scenario::chsh(), kQ, ConstraintMode::ValueEquals);
  EXPECT_EQ(p.equalities.size(), 1u);
  EXPECT_EQ(p.nonnegative.size(), 2u);
  const auto at_least = assemble(Scenario::chsh(), 2.5, ConstraintMode::ValueAtLeast);
  EXPECT_EQ(at_least.nonnegative.size(), 1u);
  AssembleOptions bad;
  bad.value_window = -1e-3;
  EXPECT_THROW(assemble(Scenario::chsh(), 2.5, ConstraintMode::ValueEquals, bad), InvalidParameter);
}

TEST(Assemble, NormalizationPinsIdentity) {
  const auto p = assemble(Scenario::chsh(), 2.4, ConstraintMode::ValueEquals);
  ASSERT_FALSE(p.equalities.empty());
  const auto& norm = p.equalities.front();
  ASSERT_EQ(norm.form.terms.size(), 1u);
  EXPECT_EQ(p.variable_names[static_cast<std::size_t>(norm.form.terms[0].first)], "1");
  EXPECT_DOUBLE_EQ(norm.rhs, 1.0);
}

TEST(Assemble, TiltedHasMomentAndTwoLocalizingBlocks) {
  const auto scenario = Scenario::tilted_chsh(kPi / 8);
  const auto p = assemble(scenario, scenario.quantum_bound, ConstraintMode::ValueEquals);
  ASSERT_EQ(p.psd_blocks.size(), 3u);
  for (const auto& block : p.psd_blocks) EXPECT_EQ(block.dimension(), 41);
}

TEST(Assemble, BellValueOutOfRange) {
  EXPECT_THROW(assemble(Scenario::chsh(), 1.9, ConstraintMode::ValueEquals), InvalidParameter);
  EXPECT_THROW(assemble(Scenario::chsh(), 2.9, ConstraintMode::ValueEquals), InvalidParameter);
  const auto tilted = Scenario::tilted_chsh(kPi / 8);
  EXPECT_THROW(assemble(tilted, 2.1, ConstraintMode::ValueEquals), InvalidParameter);
  EXPECT_THROW(analytic_chsh_baseline(1.5), InvalidParameter);
}

TEST(Assemble, ObjectiveOutsideMomentMatrix) {
  AssembleOptions o;
  o.level = 1;
  EXPECT_THROW(assemble(Scenario::chsh(), 2.5, ConstraintMode::ValueEquals, o), SequenceContainment);
}

TEST(Assemble, LocalizingSequenceOutsideMomentSequence) {
  AssembleOptions o;
  o.sequence = build_level_sequence(3, Alphabet::chsh());
  o.localizing_sequence = SequenceSet({Monomial{}, parse_monomial("B3", Alphabet::tilted())});
  const auto tilted = Scenario::tilted_chsh(kPi / 8);
  EXPECT_THROW(assemble(tilted, tilted.quantum_bound, ConstraintMode::ValueEquals, o),
               SequenceContainment);
}

TEST(Assemble, FullCorrelationNeedsMatchingTarget) {
  EXPECT_THROW(assemble(Scenario::chsh(), 2.5, ConstraintMode::FullCorrelation), InvalidParameter);
  AssembleOptions o;
  o.target = werner_strategy(0.9);
  EXPECT_THROW(assemble(Scenario::chsh(), 2.5, ConstraintMode::FullCorrelation, o), InvalidParameter);
  EXPECT_NO_THROW(assemble(Scenario::chsh(), 0.9 * kQ, ConstraintMode::FullCorrelation, o));
}

TEST(Assemble, DeterministicReassembly) {
  const auto chsh = Scenario::chsh();
  EXPECT_EQ(to_sdpa(assemble(chsh, 2.5, ConstraintMode::ValueEquals)),
            to_sdpa(assemble(Scenario::chsh(), 2.5, ConstraintMode::ValueEquals)));
  const auto tilted = Scenario::tilted_chsh(0.5);
  const double beta = 0.5 * (tilted.local_bound + tilted.quantum_bound);
  EXPECT_EQ(to_sdpa(assemble(tilted, beta, ConstraintMode::ValueAtLeast)),
            to_sdpa(assemble(Scenario::tilted_chsh(0.5), beta, ConstraintMode::ValueAtLeast)));
}

// Any strategy's own moments satisfy every constraint assembled at its Bell value.
TEST(Feasibility, StrategyMomentsSatisfyAssembledConstraints) {
  const auto chsh = Scenario::chsh();
  for (const auto& options : {exact(), AssembleOptions{}}) {
    for (double v : {0.75, 0.9, 1.0}) {
      for (auto mode : {ConstraintMode::ValueEquals, ConstraintMode::ValueAtLeast,
                        ConstraintMode::FullCorrelation}) {
        expect_feasible(chsh, werner_strategy(v), mode, options);
      }
    }
    expect_feasible(chsh, deterministic_strategy(), ConstraintMode::ValueEquals, options);
    for (double theta : {kPi / 8, kPi / 6, kPi / 4}) {
      const auto tilted = Scenario::tilted_chsh(theta);
      for (double v : {1.0, 0.97}) {
        const auto s = with_visibility(tilted_optimal_strategy(theta), v);
        if (bell_value(s, tilted.functional) < tilted.local_bound) continue;
        expect_feasible(tilted, s, ConstraintMode::ValueEquals, options);
        expect_feasible(tilted, s, ConstraintMode::ValueAtLeast, options);
      }
    }
  }
}

TEST(Solve, ChshMaximalViolation) {
  const auto chsh = Scenario::chsh();
  const auto r = solve(assemble(chsh, kQ, ConstraintMode::ValueEquals), {chsh.default_tolerance});
  ASSERT_EQ(r.status, SolveStatus::Optimal) << r.message;
  EXPECT_GE(r.bound, 1.0 - 1e-3);
  EXPECT_LE(r.bound, 1.0 + 1e-6);
}

// The relaxation minimum never exceeds the fidelity of a feasible strategy.
TEST(Solve, OracleSandwich) {
  const auto chsh = Scenario::chsh();
  for (double v : {0.75, 0.95}) {
    const auto s = werner_strategy(v);
    const auto r = solve(assemble(chsh, bell_value(s, chsh.functional), ConstraintMode::ValueEquals));
    ASSERT_EQ(r.status, SolveStatus::Optimal) << r.message;
    EXPECT_LE(r.bound, evaluate_fidelity(chsh.fidelity, s) + 1e-6) << v;
  }
  EXPECT_LE(solve(assemble(chsh, kQ * 0.95, ConstraintMode::ValueEquals)).bound, 0.9625 + 1e-6);

  const auto r = solve(assemble(chsh, 2.0, ConstraintMode::ValueEquals));
  ASSERT_EQ(r.status, SolveStatus::Optimal) << r.message;
  EXPECT_LE(r.bound, std::pow(std::cos(kPi / 8), 2) / 2.0 + 1e-6);
}

TEST(Solve, TiltedOracleSandwich) {
  const double theta = kPi / 6;
  const auto tilted = Scenario::tilted_chsh(theta);
  const auto s = with_visibility(tilted_optimal_strategy(theta), 0.99);
  const auto r = solve(assemble(tilted, bell_value(s, tilted.functional), ConstraintMode::ValueEquals),
                       {tilted.default_tolerance});
  ASSERT_EQ(r.status, SolveStatus::Optimal) << r.message;
  EXPECT_LE(r.bound, evaluate_fidelity(tilted.fidelity, s) + 1e-6);
}

// Extra constraints can only raise the minimum; the window can only lower it.
TEST(Solve, ConstraintOrdering) {
  const auto chsh = Scenario::chsh();
  const double beta = 2.6;
  const double equals = solve(assemble(chsh, beta, ConstraintMode::ValueEquals)).bound;
  const double exact_equals = solve(assemble(chsh, beta, ConstraintMode::ValueEquals, exact())).bound;
  const double at_least = solve(assemble(chsh, beta, ConstraintMode::ValueAtLeast)).bound;
  AssembleOptions full;
  full.target = reference_family_member(chsh, beta);
  const double correlated = solve(assemble(chsh, beta, ConstraintMode::FullCorrelation, full)).bound;
  EXPECT_LE(equals, exact_equals + 1e-7);
  EXPECT_NEAR(equals, exact_equals, 1e-4);
  EXPECT_LE(at_least, equals + 1e-6);
  EXPECT_GE(correlated, equals - 1e-6);
  EXPECT_LE(correlated, evaluate_fidelity(chsh.fidelity, *full.target) + 1e-6);
}

TEST(Sweep, ChshGridInOrder) {
  const std::vector<double> grid{2.0, 2.2, 2.4, 2.6, kQ};
  const auto result = sweep(Scenario::chsh(), grid, ConstraintMode::ValueEquals);
  ASSERT_EQ(result.points.size(), 5u);
  EXPECT_EQ(result.sequence, "level-3");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(result.points[i].beta, grid[i]);
    EXPECT_EQ(result.points[i].report.status, SolveStatus::Optimal) << result.points[i].report.message;
    EXPECT_TRUE(result.points[i].error.empty());
  }
  EXPECT_GE(result.points.back().fidelity, 1.0 - 1e-3);
}

TEST(Sweep, WorkerCountDoesNotChangeResults) {
  const auto grid = linear_grid(2.0, kQ, 6);
  SweepOptions one, three;
  three.workers = 3;
  const auto a = sweep(Scenario::chsh(), grid, ConstraintMode::ValueAtLeast, one);
  const auto b = sweep(Scenario::chsh(), grid, ConstraintMode::ValueAtLeast, three);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].beta, b.points[i].beta);
    EXPECT_EQ(a.points[i].fidelity, b.points[i].fidelity);
  }
}

TEST(Sweep, AtLeastIsNondecreasing) {
  const auto result =
      sweep(Scenario::chsh(), linear_grid(2.0, kQ, 9), ConstraintMode::ValueAtLeast, {.workers = 4});
  for (std::size_t i = 1; i < result.points.size(); ++i) {
    EXPECT_GE(result.points[i].fidelity, result.points[i - 1].fidelity - 1e-7) << i;
  }
}

TEST(Sweep, FullCorrelationUsesReferenceFamily) {
  const auto chsh = Scenario::chsh();
  const auto result = sweep(chsh, {2.3, 2.7}, ConstraintMode::FullCorrelation);
  for (const auto& p : result.points) {
    ASSERT_EQ(p.report.status, SolveStatus::Optimal) << p.report.message;
    EXPECT_LE(p.fidelity, evaluate_fidelity(chsh.fidelity, reference_family_member(chsh, p.beta)) + 1e-6);
  }
}

TEST(Sweep, RejectsBadGrids) {
  const auto chsh = Scenario::chsh();
  EXPECT_THROW(sweep(chsh, {2.5, 2.4}, ConstraintMode::ValueEquals), InvalidParameter);
  EXPECT_THROW(sweep(chsh, {2.5, 2.5}, ConstraintMode::ValueEquals), InvalidParameter);
  EXPECT_THROW(sweep(chsh, {1.5}, ConstraintMode::ValueEquals), InvalidParameter);
  EXPECT_THROW(sweep(chsh, {2.5}, ConstraintMode::ValueEquals, {.workers = 0}), InvalidParameter);
}

TEST(Sweep, PointErrorsAreRecordedNotThrown) {
  SweepOptions o;
  o.assemble.level = 1;
  const auto result = sweep(Scenario::chsh(), {2.2, 2.4}, ConstraintMode::ValueEquals, o);
  ASSERT_EQ(result.points.size(), 2u);
  for (const auto& p : result.points) {
    EXPECT_FALSE(p.error.empty());
    EXPECT_NE(p.report.status, SolveStatus::Optimal);
    EXPECT_TRUE(std::isnan(p.fidelity));
  }
}

TEST(LinearGrid, Endpoints) {
  EXPECT_EQ(linear_grid(2.0, 3.0, 1), std::vector<double>{2.0});
  const auto g = linear_grid(2.0, kQ, 21);
  ASSERT_EQ(g.size(), 21u);
  EXPECT_EQ(g.front(), 2.0);
  EXPECT_EQ(g.back(), kQ);
  EXPECT_THROW(linear_grid(2.0, 3.0, 0), InvalidParameter);
}

TEST(ReferenceFamily, HitsRequestedBellValue) {
  const auto chsh = Scenario::chsh();
  for (double beta : {2.0, 2.5, kQ}) {
    EXPECT_NEAR(bell_value(reference_family_member(chsh, beta), chsh.functional), beta, 1e-12);
  }
  const auto tilted = Scenario::tilted_chsh(kPi / 7);
  const double beta = 0.5 * (tilted.local_bound + tilted.quantum_bound);
  EXPECT_NEAR(bell_value(reference_family_member(tilted, beta), tilted.functional), beta, 1e-12);
}

TEST(Baseline, Examples) {
  const double star = (16.0 + 14.0 * std::numbers::sqrt2) / 17.0;
  EXPECT_NEAR(analytic_chsh_baseline(kQ), 1.0, 1e-15);
  EXPECT_NEAR(analytic_chsh_baseline(star), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(analytic_chsh_baseline(2.0), 0.5);
  EXPECT_NEAR(analytic_chsh_baseline(0.5 * (star + kQ)), 0.75, 1e-15);
}

}  // namespace
}  // namespace distest
