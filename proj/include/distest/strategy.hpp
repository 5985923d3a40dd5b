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

// Explicit two-qubit strategies: a bipartite density matrix together with
// Alice's and Bob's +-1-valued observables. They generate correlations and
// serve as feasible points for the relaxations.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>
#include <iosfwd>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "distest/errors.hpp"
#include "distest/ncpoly.hpp"

namespace distest {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct BasicQuantumStrategy {
  using Matrix = MatrixX<Scalar>;

  Matrix state;  // density matrix on H_A (x) H_B
  std::vector<Matrix> alice;
  std::vector<Matrix> bob;

  Eigen::Index alice_dim() const { return alice.empty() ? 1 : alice.front().rows(); }
  Eigen::Index bob_dim() const { return bob.empty() ? 1 : bob.front().rows(); }
};

using QuantumStrategy = BasicQuantumStrategy<double>;

template <typename Scalar = double>
MatrixX<Scalar> pauli_z() {
  MatrixX<Scalar> z(2, 2);
  z << 1, 0, 0, -1;
  return z;
}

template <typename Scalar = double>
MatrixX<Scalar> pauli_x() {
  MatrixX<Scalar> x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

template <typename Derived>
auto projector(const Eigen::MatrixBase<Derived>& ket) {
  return (ket * ket.transpose()).eval();
}

/// Throws InvalidParameter unless the state is a unit-trace symmetric matrix
/// and every observable is symmetric with O^2 = 1.
template <typename Scalar>
void validate(const BasicQuantumStrategy<Scalar>& s, double tolerance = 1e-12) {
  const auto dim = s.alice_dim() * s.bob_dim();
  if (s.state.rows() != dim || s.state.cols() != dim) {
    throw InvalidParameter("state dimension does not match the observables");
  }
  using std::abs;
  if (abs(s.state.trace() - Scalar(1)) > tolerance) {
    throw InvalidParameter("state trace differs from 1");
  }
  if ((s.state - s.state.transpose()).cwiseAbs().maxCoeff() > tolerance) {
    throw InvalidParameter("state is not symmetric");
  }
  auto check = [tolerance](const MatrixX<Scalar>& o, const char* who) {
    const auto id = MatrixX<Scalar>::Identity(o.rows(), o.cols());
    if ((o - o.transpose()).cwiseAbs().maxCoeff() > tolerance ||
        (o * o - id).cwiseAbs().maxCoeff() > tolerance) {
      throw InvalidParameter(std::string(who) + " observable is not dichotomic");
    }
  };
  for (const auto& o : s.alice) check(o, "Alice");
  for (const auto& o : s.bob) check(o, "Bob");
}

/// Relations tan(mu) = sin(2 theta) = sqrt((4 - alpha^2) / (4 + alpha^2)).
struct TiltedParameters {
  double theta = std::numbers::pi / 4;
  double alpha = 0.0;
  double mu = std::numbers::pi / 4;

  /// theta in (0, pi/4].
  static TiltedParameters from_theta(double theta);
  /// alpha in [0, 2).
  static TiltedParameters from_alpha(double alpha);

  double local_bound() const { return 2.0 + alpha; }
  double quantum_bound() const { return std::sqrt(8.0 + 2.0 * alpha * alpha); }
};

double alpha_from_theta(double theta);
double mu_from_theta(double theta);
double theta_from_alpha(double alpha);

/// <A1 B1> + <A1 B2> + <A2 B1> - <A2 B2>
OperatorPolynomial chsh_functional();
/// alpha <A1> + CHSH
OperatorPolynomial tilted_functional(double alpha);

/// Amplitudes on |00>, |01>, |10>, |11> of cos(pi/8)|Phi-> + sin(pi/8)|Psi+>,
/// with |Phi-> = (|00> - |11>)/sqrt2 and |Psi+> = (|01> + |10>)/sqrt2.
template <typename Scalar = double>
VectorX<Scalar> chsh_reference_vector() {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Scalar pi8 = std::numbers::pi_v<Scalar> / 8;
  const Scalar c = cos(pi8) / sqrt(Scalar(2));
  const Scalar s = sin(pi8) / sqrt(Scalar(2));
  VectorX<Scalar> psi(4);
  psi << c, s, s, -c;
  return psi;
}

/// cos(theta)|00> + sin(theta)|11>
template <typename Scalar = double>
VectorX<Scalar> tilted_reference_vector(Scalar theta) {
  using std::cos;
  using std::sin;
  VectorX<Scalar> psi(4);
  psi << cos(theta), 0, 0, sin(theta);
  return psi;
}

/// Maximal CHSH violation in the frame where both parties measure {Z, X}.
template <typename Scalar = double>
BasicQuantumStrategy<Scalar> chsh_optimal_strategy() {
  BasicQuantumStrategy<Scalar> s;
  s.state = projector(chsh_reference_vector<Scalar>());
  s.alice = {pauli_z<Scalar>(), pauli_x<Scalar>()};
  s.bob = {pauli_z<Scalar>(), pauli_x<Scalar>()};
  return s;
}

/// Optimal tilted-CHSH strategy; Bob also carries B3 = Z and B4 = X.
template <typename Scalar = double>
BasicQuantumStrategy<Scalar> tilted_optimal_strategy(double theta) {
  const auto params = TiltedParameters::from_theta(theta);
  const Scalar c = std::cos(params.mu);
  const Scalar s = std::sin(params.mu);
  const auto z = pauli_z<Scalar>();
  const auto x = pauli_x<Scalar>();
  BasicQuantumStrategy<Scalar> out;
  out.state = projector(tilted_reference_vector<Scalar>(Scalar(theta)));
  out.alice = {z, x};
  out.bob = {(c * z + s * x).eval(), (c * z - s * x).eval(), z, x};
  return out;
}

/// Mixes the state with white noise: v rho + (1 - v) 1/d.
template <typename Scalar>
BasicQuantumStrategy<Scalar> with_visibility(BasicQuantumStrategy<Scalar> s, double visibility) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw InvalidParameter("visibility " + std::to_string(visibility) +
                           " outside the valid range [0, 1]");
  }
  const auto dim = s.state.rows();
  const Scalar v(visibility);
  s.state = v * s.state +
            (Scalar(1) - v) / Scalar(dim) * MatrixX<Scalar>::Identity(dim, dim);
  return s;
}

/// v |psi_ref><psi_ref| + (1 - v) 1/4 with the CHSH-optimal measurements.
template <typename Scalar = double>
BasicQuantumStrategy<Scalar> werner_strategy(double visibility) {
  return with_visibility(chsh_optimal_strategy<Scalar>(), visibility);
}

/// |00> with every observable equal to Z; attains the local bound 2 of CHSH.
template <typename Scalar = double>
BasicQuantumStrategy<Scalar> deterministic_strategy(int bob_settings = 2) {
  VectorX<Scalar> ket = VectorX<Scalar>::Zero(4);
  ket(0) = 1;
  BasicQuantumStrategy<Scalar> s;
  s.state = projector(ket);
  s.alice = {pauli_z<Scalar>(), pauli_z<Scalar>()};
  s.bob.assign(static_cast<std::size_t>(bob_settings), pauli_z<Scalar>());
  return s;
}

/// Ordered matrix product of the word's letters, Alice factors (x) Bob factors.
template <typename Scalar>
MatrixX<Scalar> word_operator(const BasicQuantumStrategy<Scalar>& s, const Monomial& m) {
  auto product = [](const std::vector<MatrixX<Scalar>>& obs, const Monomial::Word& word,
                    Eigen::Index dim, char party) {
    MatrixX<Scalar> w = MatrixX<Scalar>::Identity(dim, dim);
    for (auto index : word) {
      if (index < 1 || index > obs.size()) {
        throw InvalidLetter(std::string("strategy has no observable ") + party +
                            std::to_string(index));
      }
      w = w * obs[index - 1];
    }
    return w;
  };
  const auto wa = product(s.alice, m.alice(), s.alice_dim(), 'A');
  const auto wb = product(s.bob, m.bob(), s.bob_dim(), 'B');
  return Eigen::kroneckerProduct(wa, wb).eval();
}

/// tr(rho W) for the word operator W of `m`.
template <typename Scalar>
Scalar evaluate_word(const BasicQuantumStrategy<Scalar>& s, const Monomial& m) {
  return (s.state * word_operator(s, m)).trace();
}

template <typename Scalar>
Scalar bell_value(const BasicQuantumStrategy<Scalar>& s, const OperatorPolynomial& f) {
  Scalar total(0);
  for (const auto& [m, c] : f.terms()) total += Scalar(c) * evaluate_word(s, m);
  return total;
}

/// Each key mapped to (<w> + <w^dagger>) / 2.
template <typename Scalar>
std::map<MomentKey, double> populate_moments(const BasicQuantumStrategy<Scalar>& s,
                                             const std::set<MomentKey>& keys) {
  std::map<MomentKey, double> out;
  for (const auto& key : keys) {
    const auto& w = key.representative;
    const Scalar value = (evaluate_word(s, w) + evaluate_word(s, adjoint(w))) / Scalar(2);
    out.emplace(key, static_cast<double>(value));
  }
  return out;
}

/// <psi| rho |psi>
template <typename Scalar, typename Derived>
Scalar state_overlap(const BasicQuantumStrategy<Scalar>& s, const Eigen::MatrixBase<Derived>& psi) {
  return psi.dot(s.state * psi);
}

/// Row-major decimal text: a `state r c` header followed by its rows, then one
/// `alice k r c` / `bob k r c` section per observable.
std::string dump_strategy(const QuantumStrategy& s);
QuantumStrategy parse_strategy(const std::string& text);

}  // namespace distest
