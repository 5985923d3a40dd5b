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

// Operator sequences and the symbolic moment / localizing matrices they
// generate. Entries are expressed over MomentKeys, so every matrix here is
// real symmetric once moments are substituted.

#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "distest/ncpoly.hpp"

namespace distest {

/// Ordered, duplicate-free list of monomials starting with the identity.
class SequenceSet {
 public:
  explicit SequenceSet(std::vector<Monomial> monomials);

  const std::vector<Monomial>& monomials() const { return monomials_; }
  std::size_t size() const { return monomials_.size(); }
  const Monomial& operator[](std::size_t i) const { return monomials_[i]; }
  bool contains(const Monomial& m) const { return positions_.contains(m); }
  std::optional<std::size_t> index_of(const Monomial& m) const;

  auto begin() const { return monomials_.begin(); }
  auto end() const { return monomials_.end(); }

 private:
  std::vector<Monomial> monomials_;
  std::map<Monomial, std::size_t> positions_;
};

/// All reduced monomials of length <= level, in monomial order.
SequenceSet build_level_sequence(int level, const Alphabet& alphabet);

/// The 16 words added to the level-3 CHSH sequence for the tilted scenario.
std::vector<Monomial> tilted_extra_monomials();

/// Level-3 sequence over {A1, A2, B1, B2} followed by tilted_extra_monomials().
SequenceSet tilted_sequence();

/// SDP variable ids, assigned in order of first registration.
class VariableIndex {
 public:
  int add(const MomentKey& key);
  std::optional<int> find(const MomentKey& key) const;
  int at(const MomentKey& key) const;
  const MomentKey& key(int id) const { return keys_.at(static_cast<std::size_t>(id)); }
  const std::vector<MomentKey>& keys() const { return keys_; }
  std::size_t size() const { return keys_.size(); }

 private:
  std::map<MomentKey, int> ids_;
  std::vector<MomentKey> keys_;
};

struct MomentMatrixSkeleton {
  SequenceSet sequence;
  std::vector<MomentKey> entry_keys;  // row-major, key(S_j^dagger S_i) at (i, j)
  VariableIndex variables;

  std::size_t dimension() const { return sequence.size(); }
  const MomentKey& key(std::size_t i, std::size_t j) const {
    return entry_keys[i * dimension() + j];
  }
};

struct LocalizingSkeleton {
  SequenceSet sequence;
  OperatorPolynomial localizer;  // Hermitian part of the localized operator
  std::vector<OperatorPolynomial> entry_forms;  // row-major key forms
  /// Nonzero key forms of S'_j^dagger K S'_i for i < j, K the anti-Hermitian
  /// part of the localized operator. They vanish whenever the operator is PSD.
  std::vector<OperatorPolynomial> hermiticity_forms;

  std::size_t dimension() const { return sequence.size(); }
  const OperatorPolynomial& entry(std::size_t i, std::size_t j) const {
    return entry_forms[i * dimension() + j];
  }
};

MomentMatrixSkeleton build_moment_skeleton(const SequenceSet& sequence);

/// Entry (i, j) is the key form of S'_j^dagger H S'_i where H is the Hermitian
/// part of `localizer`. New keys are registered in `moment.variables`.
/// Throws SequenceContainment unless `sprime` is a subset of moment.sequence.
LocalizingSkeleton build_localizing_skeleton(const OperatorPolynomial& localizer,
                                             const SequenceSet& sprime,
                                             MomentMatrixSkeleton& moment);

std::set<MomentKey> keys_of(const MomentMatrixSkeleton& skeleton);
std::set<MomentKey> keys_of(const LocalizingSkeleton& skeleton);

/// Which operator the second tilted localizing constraint uses.
enum class SecondLocalizer {
  B4,         // B4 (B1 - B2) / sin(mu), the positivity condition on Bob's side
  LiteralB3,  // B3 (B1 - B2) / sin(mu)
};

/// B3 (B1 + B2) / cos(mu)
OperatorPolynomial first_bob_localizer(double mu);
OperatorPolynomial second_bob_localizer(double mu, SecondLocalizer variant = SecondLocalizer::B4);

/// Substitutes moment values; throws InvalidParameter on a missing key.
Eigen::MatrixXd fill(const MomentMatrixSkeleton& skeleton,
                     const std::map<MomentKey, double>& moments);
Eigen::MatrixXd fill(const LocalizingSkeleton& skeleton,
                     const std::map<MomentKey, double>& moments);

/// Upper-triangle `row col variable-id coefficient` lines (0-based).
std::string export_triplets(const MomentMatrixSkeleton& skeleton);
std::string export_triplets(const LocalizingSkeleton& skeleton, const VariableIndex& variables);

}  // namespace distest
