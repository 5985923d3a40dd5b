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

#include "distest/ncpoly.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "distest/errors.hpp"

namespace distest {
namespace {

// Appends `letter` to a reduced word, cancelling X X = 1.
void push_reduced(Monomial::Word& word, std::uint8_t letter) {
  if (!word.empty() && word.back() == letter) {
    word.pop_back();
  } else {
    word.push_back(letter);
  }
}

Monomial::Word reduce(const Monomial::Word& word) {
  Monomial::Word out;
  out.reserve(word.size());
  for (auto letter : word) push_reduced(out, letter);
  return out;
}

Monomial::Word concat_reduced(const Monomial::Word& lhs, const Monomial::Word& rhs) {
  Monomial::Word out = lhs;
  for (auto letter : rhs) push_reduced(out, letter);
  return out;
}

std::string format_coefficient(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

bool Alphabet::contains(OperatorLetter letter) const {
  const int limit = letter.party == Party::Alice ? alice_settings : bob_settings;
  return letter.index >= 1 && letter.index <= limit;
}

std::vector<OperatorLetter> Alphabet::letters() const {
  std::vector<OperatorLetter> out;
  for (int x = 1; x <= alice_settings; ++x) out.push_back(A(x));
  for (int y = 1; y <= bob_settings; ++y) out.push_back(B(y));
  return out;
}

Monomial::Monomial(Word alice, Word bob) : alice_(reduce(alice)), bob_(reduce(bob)) {}

std::vector<OperatorLetter> Monomial::letters() const {
  std::vector<OperatorLetter> out;
  out.reserve(length());
  for (auto x : alice_) out.push_back({Party::Alice, x});
  for (auto y : bob_) out.push_back({Party::Bob, y});
  return out;
}

std::strong_ordering operator<=>(const Monomial& lhs, const Monomial& rhs) {
  if (auto c = lhs.length() <=> rhs.length(); c != 0) return c;
  if (auto c = lhs.alice_.size() <=> rhs.alice_.size(); c != 0) return c;
  if (auto c = lhs.alice_ <=> rhs.alice_; c != 0) return c;
  return lhs.bob_ <=> rhs.bob_;
}

Monomial canonicalize(std::span<const OperatorLetter> raw_word, const Alphabet& alphabet) {
  Monomial::Word alice;
  Monomial::Word bob;
  for (const auto& letter : raw_word) {
    if (!alphabet.contains(letter)) {
      const char party = letter.party == Party::Alice ? 'A' : 'B';
      const int limit = letter.party == Party::Alice ? alphabet.alice_settings
                                                     : alphabet.bob_settings;
      throw InvalidLetter("letter " + std::string(1, party) + std::to_string(letter.index) +
                          " outside the alphabet (valid indices 1.." + std::to_string(limit) +
                          ")");
    }
    push_reduced(letter.party == Party::Alice ? alice : bob, letter.index);
  }
  return Monomial(std::move(alice), std::move(bob));
}

Monomial adjoint(const Monomial& m) {
  Monomial::Word alice(m.alice().rbegin(), m.alice().rend());
  Monomial::Word bob(m.bob().rbegin(), m.bob().rend());
  return Monomial(std::move(alice), std::move(bob));
}

Monomial multiply(const Monomial& lhs, const Monomial& rhs) {
  return Monomial(concat_reduced(lhs.alice(), rhs.alice()), concat_reduced(lhs.bob(), rhs.bob()));
}

MomentKey moment_key(const Monomial& m) {
  Monomial adj = adjoint(m);
  return {adj < m ? std::move(adj) : m};
}

std::string to_string(const Monomial& m) {
  if (m.is_identity()) return "1";
  auto word = [](char party, const Monomial::Word& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i > 0) out += '.';
      out += party;
      out += std::to_string(w[i]);
    }
    return out;
  };
  std::string out = word('A', m.alice());
  if (!m.bob().empty()) {
    if (!out.empty()) out += '*';
    out += word('B', m.bob());
  }
  return out;
}

std::string to_string(const MomentKey& key) { return to_string(key.representative); }

std::ostream& operator<<(std::ostream& os, const Monomial& m) { return os << to_string(m); }

Monomial parse_monomial(std::string_view text, const Alphabet& alphabet) {
  const std::string_view original = text;
  text = trim(text);
  if (text == "1") return {};
  if (text.empty()) throw ParseError("empty monomial");
  std::vector<OperatorLetter> letters;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '.' || c == '*') {
      ++i;
      continue;
    }
    if (c != 'A' && c != 'B') {
      throw ParseError("unexpected character in monomial '" + std::string(original) + "'");
    }
    ++i;
    int index = 0;
    const auto* begin = text.data() + i;
    auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), index);
    if (ec != std::errc{} || ptr == begin || index < 1 || index > 255) {
      throw ParseError("missing letter index in monomial '" + std::string(original) + "'");
    }
    i += static_cast<std::size_t>(ptr - begin);
    letters.push_back({c == 'A' ? Party::Alice : Party::Bob, static_cast<std::uint8_t>(index)});
  }
  return canonicalize(letters, alphabet);
}

// ---------------------------------------------------------------------------

OperatorPolynomial::OperatorPolynomial(const Monomial& m, double coefficient) {
  add_term(m, coefficient);
}

OperatorPolynomial OperatorPolynomial::constant(double value) {
  return OperatorPolynomial(Monomial{}, value);
}

double OperatorPolynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void OperatorPolynomial::add_term(const Monomial& m, double coefficient) {
  if (coefficient == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0.0) terms_.erase(it);
  }
}

OperatorPolynomial& OperatorPolynomial::operator+=(const OperatorPolynomial& rhs) {
  for (const auto& [m, c] : rhs.terms_) add_term(m, c);
  return *this;
}

OperatorPolynomial& OperatorPolynomial::operator-=(const OperatorPolynomial& rhs) {
  for (const auto& [m, c] : rhs.terms_) add_term(m, -c);
  return *this;
}

OperatorPolynomial& OperatorPolynomial::operator*=(double scale) {
  if (scale == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= scale;
  return *this;
}

OperatorPolynomial poly_add(const OperatorPolynomial& p, const OperatorPolynomial& q) {
  OperatorPolynomial out = p;
  out += q;
  return out;
}

OperatorPolynomial poly_scale(const OperatorPolynomial& p, double scale) {
  OperatorPolynomial out = p;
  out *= scale;
  return out;
}

OperatorPolynomial poly_multiply(const OperatorPolynomial& p, const OperatorPolynomial& q) {
  OperatorPolynomial out;
  for (const auto& [mp, cp] : p.terms()) {
    for (const auto& [mq, cq] : q.terms()) out.add_term(mp * mq, cp * cq);
  }
  return out;
}

OperatorPolynomial operator+(const OperatorPolynomial& p, const OperatorPolynomial& q) {
  return poly_add(p, q);
}
OperatorPolynomial operator-(const OperatorPolynomial& p, const OperatorPolynomial& q) {
  OperatorPolynomial out = p;
  out -= q;
  return out;
}
OperatorPolynomial operator-(const OperatorPolynomial& p) { return poly_scale(p, -1.0); }
OperatorPolynomial operator*(const OperatorPolynomial& p, const OperatorPolynomial& q) {
  return poly_multiply(p, q);
}
OperatorPolynomial operator*(double scale, const OperatorPolynomial& p) {
  return poly_scale(p, scale);
}
OperatorPolynomial operator*(const OperatorPolynomial& p, double scale) {
  return poly_scale(p, scale);
}

OperatorPolynomial adjoint(const OperatorPolynomial& p) {
  OperatorPolynomial out;
  for (const auto& [m, c] : p.terms()) out.add_term(adjoint(m), c);
  return out;
}

OperatorPolynomial hermitian_part(const OperatorPolynomial& p) {
  return 0.5 * (p + adjoint(p));
}

bool is_hermitian(const OperatorPolynomial& p, double tolerance) {
  for (const auto& [m, c] : p.terms()) {
    if (std::abs(p.coefficient(adjoint(m)) - c) > tolerance) return false;
  }
  return true;
}

OperatorPolynomial prune(const OperatorPolynomial& p, double tolerance) {
  OperatorPolynomial out;
  for (const auto& [m, c] : p.terms()) {
    if (std::abs(c) > tolerance) out.add_term(m, c);
  }
  return out;
}

OperatorPolynomial key_form(const OperatorPolynomial& p) {
  OperatorPolynomial out;
  for (const auto& [m, c] : p.terms()) out.add_term(moment_key(m).representative, c);
  return out;
}

double max_coefficient_difference(const OperatorPolynomial& p, const OperatorPolynomial& q) {
  double worst = 0.0;
  for (const auto& [m, c] : p.terms()) worst = std::max(worst, std::abs(c - q.coefficient(m)));
  for (const auto& [m, c] : q.terms()) worst = std::max(worst, std::abs(c - p.coefficient(m)));
  return worst;
}

std::string to_string(const OperatorPolynomial& p) {
  std::string out;
  for (const auto& [m, c] : p.terms()) {
    out += format_coefficient(c);
    out += ' ';
    out += to_string(m);
    out += '\n';
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const OperatorPolynomial& p) {
  return os << to_string(p);
}

OperatorPolynomial parse_polynomial(std::string_view text, const Alphabet& alphabet) {
  OperatorPolynomial out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    auto content = trim(line);
    if (auto hash = content.find('#'); hash != std::string_view::npos) {
      content = trim(content.substr(0, hash));
    }
    if (content.empty()) continue;
    const auto space = content.find_first_of(" \t");
    if (space == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_number) + ": expected 'coeff monomial'");
    }
    const std::string coeff_text(content.substr(0, space));
    double coeff = 0.0;
    try {
      std::size_t used = 0;
      coeff = std::stod(coeff_text, &used);
      if (used != coeff_text.size()) throw std::invalid_argument(coeff_text);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_number) + ": bad coefficient '" +
                       coeff_text + "'");
    }
    out.add_term(parse_monomial(content.substr(space + 1), alphabet), coeff);
  }
  return out;
}

}  // namespace distest
