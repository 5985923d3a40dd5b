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
#include <random>

#include "distest/errors.hpp"
#include "distest/fidelity.hpp"

namespace distest {
namespace {

constexpr double kPi = std::numbers::pi;

Monomial M(const char* text) { return parse_monomial(text, Alphabet::tilted()); }
OperatorPolynomial P(const char* text) { return OperatorPolynomial(M(text)); }

void expect_same_polynomial(const OperatorPolynomial& a, const OperatorPolynomial& b, double tol) {
  ASSERT_EQ(a.size(), b.size()) << to_string(a) << "\nvs\n" << to_string(b);
  for (const auto& [m, c] : a.terms()) {
    EXPECT_NEAR(b.coefficient(m), c, tol) << to_string(m);
    EXPECT_NE(b.coefficient(m), 0.0) << to_string(m) << " missing";
  }
}

// A random real two-qubit density matrix: G G^T / tr with Gaussian G.
Eigen::Matrix4d random_state(std::mt19937& rng) {
  std::normal_distribution<double> gauss;
  Eigen::Matrix4d g;
  for (auto& x : g.reshaped()) x = gauss(rng);
  const Eigen::Matrix4d rho = g * g.transpose();
  return rho / rho.trace();
}

TEST(ChoiBlocks, AliceExample) {
  const auto grid = choi_blocks(A(1), A(2));
  EXPECT_EQ(grid.party, Party::Alice);
  const auto one = OperatorPolynomial::constant(1.0);
  EXPECT_EQ(grid(0, 0), 0.5 * (one + P("A1")));
  EXPECT_EQ(grid(0, 1), 0.5 * (P("A2") - P("A2A1")));
  EXPECT_EQ(grid(1, 0), 0.5 * (P("A2") - P("A1A2")));
  EXPECT_EQ(grid(1, 1), 0.5 * (one - P("A1")));
}

TEST(ChoiBlocks, BobAuxiliaryExample) {
  const auto grid = choi_blocks(B(3), B(4));
  EXPECT_EQ(grid.party, Party::Bob);
  EXPECT_EQ(grid(0, 1), 0.5 * (P("B4") - P("B4B3")));
}

TEST(ChoiBlocks, TracePreservingAndAdjointSymmetric) {
  for (const auto& grid : {choi_blocks(A(1), A(2)), choi_blocks(B(1), B(2)), choi_blocks(B(3), B(4)),
                           choi_blocks(A(2), A(1))}) {
    EXPECT_EQ(grid(0, 0) + grid(1, 1), OperatorPolynomial::constant(1.0));
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) EXPECT_EQ(grid(j, i), adjoint(grid(i, j)));
    }
  }
}

TEST(ChoiBlocks, MixedPartiesRejected) {
  EXPECT_THROW(choi_blocks(A(1), B(2)), InvalidLetter);
}

// With first = Z and second = X the blocks are exactly |i><j| on a qubit.
TEST(ChoiBlocks, ReduceToMatrixUnitsOnQubit) {
  QuantumStrategy s;
  s.alice = {pauli_z(), pauli_x()};
  s.state = Eigen::MatrixXd::Identity(2, 2) / 2.0;
  const auto grid = choi_blocks(A(1), A(2));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Eigen::MatrixXd op = Eigen::MatrixXd::Zero(2, 2);
      for (const auto& [m, c] : grid(i, j).terms()) op += c * word_operator(s, m);
      Eigen::Matrix2d unit = Eigen::Matrix2d::Zero();
      unit(i, j) = 1.0;
      EXPECT_NEAR((op - unit).norm(), 0.0, 1e-15) << i << j;
    }
  }
}

TEST(ReferenceState, NormalizationEnforced) {
  EXPECT_THROW(ReferenceState({1.0, 1.0, 0.0, 0.0}), InvalidParameter);
  for (double theta : {0.1, kPi / 8, kPi / 4}) {
    EXPECT_NEAR(ReferenceState::tilted(theta).vector().squaredNorm(), 1.0, 1e-12);
  }
  EXPECT_NEAR(ReferenceState::chsh().vector().squaredNorm(), 1.0, 1e-12);
  EXPECT_THROW(ReferenceState::tilted(0.9), InvalidParameter);
}

TEST(FidelityPolynomial, ChshMatchesClosedForm) {
  expect_same_polynomial(chsh_fidelity().polynomial, chsh_fidelity_oracle().polynomial, 1e-12);
}

TEST(FidelityPolynomial, TiltedMatchesClosedFormOnTenAngles) {
  for (int k = 1; k <= 10; ++k) {
    const double theta = k * (kPi / 4) / 10;
    SCOPED_TRACE(theta);
    expect_same_polynomial(tilted_fidelity(theta).polynomial,
                           tilted_fidelity_oracle(theta).polynomial, 1e-12);
  }
}

// (cos^2 + sin^2 + sin^2 + cos^2)(pi/8) / 8
TEST(FidelityPolynomial, ChshIdentityCoefficientIsQuarter) {
  EXPECT_NEAR(chsh_fidelity().polynomial.coefficient(Monomial{}), 0.25, 1e-15);
  EXPECT_NEAR(chsh_fidelity_oracle().polynomial.coefficient(Monomial{}), 0.25, 1e-15);
}

TEST(FidelityPolynomial, TiltedCoefficients) {
  const double theta = 0.4;
  for (const auto& f : {tilted_fidelity(theta), tilted_fidelity_oracle(theta)}) {
    EXPECT_NEAR(f.polynomial.coefficient(M("A1B3")), 0.25, 1e-15);
    EXPECT_NEAR(f.polynomial.coefficient(M("A2B4")),
                2.0 * std::cos(theta) * std::sin(theta) / 4.0, 1e-15);
    EXPECT_NEAR(f.polynomial.coefficient(Monomial{}), 0.25, 1e-15);
  }
}

TEST(FidelityPolynomial, IsHermitianWithOnlyRelaxedLetters) {
  const auto chsh = chsh_fidelity();
  EXPECT_TRUE(is_hermitian(chsh.polynomial));
  const auto tilted = tilted_fidelity(0.3);
  EXPECT_TRUE(is_hermitian(tilted.polynomial));
  for (const auto& [m, c] : tilted.polynomial.terms()) {
    for (auto y : m.bob()) EXPECT_GE(y, 3) << to_string(m);
  }
}

TEST(FidelityPolynomial, RejectsSwappedGrids) {
  EXPECT_THROW(fidelity_polynomial(ReferenceState::chsh(), choi_blocks(B(1), B(2)),
                                   choi_blocks(A(1), A(2))),
               InvalidLetter);
}

TEST(Evaluate, ChshExamples) {
  const auto f = chsh_fidelity();
  EXPECT_NEAR(evaluate_fidelity(f, chsh_optimal_strategy()), 1.0, 1e-12);
  for (double v : {0.0, 0.3, 0.8, 0.9}) {
    EXPECT_NEAR(evaluate_fidelity(f, werner_strategy(v)), (1.0 + 3.0 * v) / 4.0, 1e-12);
  }
  const double c = std::cos(kPi / 8);
  EXPECT_NEAR(evaluate_fidelity(f, deterministic_strategy()), c * c / 2.0, 1e-12);
  EXPECT_NEAR(evaluate_fidelity(f, deterministic_strategy()), 0.4268, 1e-4);
}

TEST(Evaluate, TiltedOptimalGivesOne) {
  for (int k = 1; k <= 10; ++k) {
    const double theta = k * (kPi / 4) / 10;
    EXPECT_NEAR(evaluate_fidelity(tilted_fidelity_oracle(theta), tilted_optimal_strategy(theta)), 1.0,
                1e-12);
    EXPECT_NEAR(evaluate_fidelity(tilted_fidelity(theta), tilted_optimal_strategy(theta)), 1.0,
                1e-12);
  }
}

// On qubits the identity-channel construction is exact, so the polynomial
// must reproduce <psi_ref| rho |psi_ref> for arbitrary states.
TEST(Evaluate, EqualsDirectOverlapOnRandomQubitStates) {
  std::mt19937 rng(2026);
  for (int trial = 0; trial < 50; ++trial) {
    auto chsh = chsh_optimal_strategy();
    chsh.state = random_state(rng);
    const double direct = ReferenceState::chsh().vector().dot(chsh.state * ReferenceState::chsh().vector());
    const double value = evaluate_fidelity(chsh_fidelity(), chsh);
    EXPECT_NEAR(value, direct, 1e-10);
    EXPECT_GE(value, -1e-9);
    EXPECT_LE(value, 1.0 + 1e-9);

    const double theta = 0.05 + 0.7 * trial / 50.0;
    auto tilted = tilted_optimal_strategy(theta);
    tilted.state = chsh.state;
    const Eigen::Vector4d ref = ReferenceState::tilted(theta).vector();
    EXPECT_NEAR(evaluate_fidelity(tilted_fidelity(theta), tilted), ref.dot(tilted.state * ref), 1e-10);
  }
}

TEST(Evaluate, WithinUnitIntervalOnGeneratedStrategies) {
  const auto f = chsh_fidelity();
  for (double v = 0.0; v <= 1.0; v += 0.05) {
    const double value = evaluate_fidelity(f, werner_strategy(v));
    EXPECT_GE(value, -1e-9);
    EXPECT_LE(value, 1.0 + 1e-9);
  }
  for (int k = 1; k <= 10; ++k) {
    const double theta = k * (kPi / 4) / 10;
    for (double v : {0.0, 0.5, 1.0}) {
      const double value =
          evaluate_fidelity(tilted_fidelity(theta), with_visibility(tilted_optimal_strategy(theta), v));
      EXPECT_GE(value, -1e-9);
      EXPECT_LE(value, 1.0 + 1e-9);
    }
  }
}

TEST(Evaluate, MissingLetterPropagates) {
  EXPECT_THROW(evaluate_fidelity(tilted_fidelity(0.5), chsh_optimal_strategy()), InvalidLetter);
}

}  // namespace
}  // namespace distest
