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

// Device-independent fidelity objective.
//
// The identity channel on a qubit has Choi matrix |phi+><phi+| =
// sum_ij |i><j| (x) |i><j|. Writing each |i><j| in terms of two dichotomic
// observables (exact when they are Z and X) and then relaxing those
// observables to unknown ones turns <psi_ref| (id (x) id)(rho) |psi_ref> into
// a linear functional of moments.

#pragma once

#include <Eigen/Dense>
#include <array>

#include "distest/ncpoly.hpp"
#include "distest/strategy.hpp"

namespace distest {

/// Operator-valued 2x2 decomposition of one party's identity-channel Choi
/// matrix: blocks(i, j) stands for |i><j|.
struct ChoiBlockGrid {
  Party party = Party::Alice;
  std::array<std::array<OperatorPolynomial, 2>, 2> blocks;

  const OperatorPolynomial& operator()(int i, int j) const {
    return blocks[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
};

/// `first` plays the role of Z and `second` the role of X:
///   [(1 + F)/2, (S - S F)/2; (S - F S)/2, (1 - F)/2].
ChoiBlockGrid choi_blocks(OperatorLetter first, OperatorLetter second);

/// Real two-qubit pure state in the basis |00>, |01>, |10>, |11>.
class ReferenceState {
 public:
  explicit ReferenceState(const std::array<double, 4>& amplitudes);

  static ReferenceState chsh();
  static ReferenceState tilted(double theta);

  const std::array<double, 4>& amplitudes() const { return amplitudes_; }
  /// Amplitude of |i>_A |k>_B.
  double amplitude(int i, int k) const { return amplitudes_[static_cast<std::size_t>(2 * i + k)]; }
  Eigen::Vector4d vector() const { return Eigen::Vector4d(amplitudes_.data()); }

 private:
  std::array<double, 4> amplitudes_;
};

struct FidelityFunctional {
  OperatorPolynomial polynomial;
};

/// sum_{ijkl} <psi|(|i><j| (x) |k><l|)|psi> alice(i, j) bob(k, l), Hermitian part.
FidelityFunctional fidelity_polynomial(const ReferenceState& ref, const ChoiBlockGrid& alice,
                                       const ChoiBlockGrid& bob);

/// Objective for the maximally entangled state in the {Z, X} frame.
FidelityFunctional chsh_fidelity();
/// Objective for cos(theta)|00> + sin(theta)|11>, Bob's blocks built on B3, B4.
FidelityFunctional tilted_fidelity(double theta);

/// Hand-transcribed closed forms used to validate fidelity_polynomial.
FidelityFunctional chsh_fidelity_oracle();
FidelityFunctional tilted_fidelity_oracle(double theta);

template <typename Scalar>
Scalar evaluate_fidelity(const FidelityFunctional& f, const BasicQuantumStrategy<Scalar>& s) {
  return bell_value(s, f.polynomial);
}

}  // namespace distest
