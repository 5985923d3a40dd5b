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

// Words over dichotomic observables A_x (Alice) and B_y (Bob).
//
// Every letter is Hermitian and squares to the identity; letters of different
// parties commute. A Monomial is the unique reduced form of a word: the Alice
// word followed by the Bob word, neither containing two equal adjacent letters.

#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace distest {

enum class Party : std::uint8_t { Alice, Bob };

struct OperatorLetter {
  Party party = Party::Alice;
  std::uint8_t index = 1;  // 1-based setting label

  friend auto operator<=>(const OperatorLetter&, const OperatorLetter&) = default;
};

inline constexpr OperatorLetter A(int index) {
  return {Party::Alice, static_cast<std::uint8_t>(index)};
}
inline constexpr OperatorLetter B(int index) {
  return {Party::Bob, static_cast<std::uint8_t>(index)};
}

/// Number of measurement settings per party.
struct Alphabet {
  int alice_settings = 2;
  int bob_settings = 2;

  static constexpr Alphabet chsh() { return {2, 2}; }
  /// Bob carries two auxiliary observables B3, B4 in addition to B1, B2.
  static constexpr Alphabet tilted() { return {2, 4}; }

  bool contains(OperatorLetter letter) const;
  std::vector<OperatorLetter> letters() const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

class Monomial {
 public:
  using Word = std::vector<std::uint8_t>;

  /// The identity.
  Monomial() = default;

  /// Reduces both words; `alice` and `bob` hold 1-based setting labels.
  Monomial(Word alice, Word bob);

  const Word& alice() const { return alice_; }
  const Word& bob() const { return bob_; }
  std::size_t length() const { return alice_.size() + bob_.size(); }
  bool is_identity() const { return alice_.empty() && bob_.empty(); }

  /// Ordered letters, Alice first.
  std::vector<OperatorLetter> letters() const;

  friend bool operator==(const Monomial&, const Monomial&) = default;
  /// Total length, then Alice length, then lexicographic on setting labels.
  friend std::strong_ordering operator<=>(const Monomial& lhs, const Monomial& rhs);

 private:
  Word alice_;
  Word bob_;
};

Monomial canonicalize(std::span<const OperatorLetter> raw_word, const Alphabet& alphabet);
Monomial adjoint(const Monomial& m);
Monomial multiply(const Monomial& lhs, const Monomial& rhs);
inline Monomial operator*(const Monomial& lhs, const Monomial& rhs) { return multiply(lhs, rhs); }

/// Identifies a moment with the moment of its adjoint.
struct MomentKey {
  Monomial representative;

  friend bool operator==(const MomentKey&, const MomentKey&) = default;
  friend auto operator<=>(const MomentKey&, const MomentKey&) = default;
};

MomentKey moment_key(const Monomial& m);

std::string to_string(const Monomial& m);
std::string to_string(const MomentKey& key);
std::ostream& operator<<(std::ostream& os, const Monomial& m);

/// Accepts `1`, `A1.A2*B1` and the compact form `A1A2B1`.
Monomial parse_monomial(std::string_view text, const Alphabet& alphabet);

/// Real linear combination of monomials. Zero coefficients are never stored.
class OperatorPolynomial {
 public:
  using Terms = std::map<Monomial, double>;

  OperatorPolynomial() = default;
  OperatorPolynomial(const Monomial& m, double coefficient = 1.0);  // NOLINT
  static OperatorPolynomial constant(double value);

  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  double coefficient(const Monomial& m) const;

  /// Adds `coefficient` to the term of `m`, dropping it when the sum is zero.
  void add_term(const Monomial& m, double coefficient);

  OperatorPolynomial& operator+=(const OperatorPolynomial& rhs);
  OperatorPolynomial& operator-=(const OperatorPolynomial& rhs);
  OperatorPolynomial& operator*=(double scale);

  friend bool operator==(const OperatorPolynomial&, const OperatorPolynomial&) = default;

 private:
  Terms terms_;
};

OperatorPolynomial poly_add(const OperatorPolynomial& p, const OperatorPolynomial& q);
OperatorPolynomial poly_scale(const OperatorPolynomial& p, double scale);
OperatorPolynomial poly_multiply(const OperatorPolynomial& p, const OperatorPolynomial& q);

OperatorPolynomial operator+(const OperatorPolynomial& p, const OperatorPolynomial& q);
OperatorPolynomial operator-(const OperatorPolynomial& p, const OperatorPolynomial& q);
OperatorPolynomial operator-(const OperatorPolynomial& p);
OperatorPolynomial operator*(const OperatorPolynomial& p, const OperatorPolynomial& q);
OperatorPolynomial operator*(double scale, const OperatorPolynomial& p);
OperatorPolynomial operator*(const OperatorPolynomial& p, double scale);

OperatorPolynomial adjoint(const OperatorPolynomial& p);
/// (p + adjoint(p)) / 2
OperatorPolynomial hermitian_part(const OperatorPolynomial& p);
bool is_hermitian(const OperatorPolynomial& p, double tolerance = 0.0);

/// Drops terms with |coefficient| <= tolerance.
OperatorPolynomial prune(const OperatorPolynomial& p, double tolerance);

/// Replaces every monomial by its moment-key representative and merges terms.
/// Two polynomials have equal key forms iff they have equal expectation on
/// every real moment assignment.
OperatorPolynomial key_form(const OperatorPolynomial& p);

/// Largest |coefficient| difference over the union of both monomial sets.
double max_coefficient_difference(const OperatorPolynomial& p, const OperatorPolynomial& q);

/// One `coeff monomial` line per term, in monomial order, coefficients at
/// round-trip precision.
std::string to_string(const OperatorPolynomial& p);
std::ostream& operator<<(std::ostream& os, const OperatorPolynomial& p);

/// Inverse of to_string; blank lines and `#` comments are ignored. Repeated
/// monomials are summed.
OperatorPolynomial parse_polynomial(std::string_view text, const Alphabet& alphabet);

}  // namespace distest
