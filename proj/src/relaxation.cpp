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

#include "distest/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "distest/errors.hpp"

namespace distest {
namespace {

// Reduced words of each length 0..max_length over `settings` letters.
std::vector<std::vector<Monomial::Word>> party_words(int settings, int max_length) {
  std::vector<std::vector<Monomial::Word>> by_length(static_cast<std::size_t>(max_length) + 1);
  by_length[0].push_back({});
  for (int len = 1; len <= max_length; ++len) {
    for (const auto& prefix : by_length[static_cast<std::size_t>(len) - 1]) {
      for (int x = 1; x <= settings; ++x) {
        if (!prefix.empty() && prefix.back() == x) continue;
        auto word = prefix;
        word.push_back(static_cast<std::uint8_t>(x));
        by_length[static_cast<std::size_t>(len)].push_back(std::move(word));
      }
    }
  }
  return by_length;
}

double lookup(const std::map<MomentKey, double>& moments, const MomentKey& key) {
  auto it = moments.find(key);
  if (it == moments.end()) {
    throw InvalidParameter("no value supplied for moment " + to_string(key));
  }
  return it->second;
}

}  // namespace

SequenceSet::SequenceSet(std::vector<Monomial> monomials) : monomials_(std::move(monomials)) {
  if (monomials_.empty() || !monomials_.front().is_identity()) {
    throw InvalidParameter("operator sequence must start with the identity");
  }
  for (std::size_t i = 0; i < monomials_.size(); ++i) {
    if (!positions_.emplace(monomials_[i], i).second) {
      throw InvalidParameter("duplicate monomial " + to_string(monomials_[i]) +
                             " in operator sequence");
    }
  }
}

std::optional<std::size_t> SequenceSet::index_of(const Monomial& m) const {
  auto it = positions_.find(m);
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

SequenceSet build_level_sequence(int level, const Alphabet& alphabet) {
  if (level < 1) throw InvalidParameter("hierarchy level must be >= 1");
  const auto alice = party_words(alphabet.alice_settings, level);
  const auto bob = party_words(alphabet.bob_settings, level);
  std::vector<Monomial> out;
  for (int a = 0; a <= level; ++a) {
    for (int b = 0; a + b <= level; ++b) {
      for (const auto& wa : alice[static_cast<std::size_t>(a)]) {
        for (const auto& wb : bob[static_cast<std::size_t>(b)]) out.emplace_back(wa, wb);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return SequenceSet(std::move(out));
}

std::vector<Monomial> tilted_extra_monomials() {
  using W = Monomial::Word;
  return {
      Monomial({}, W{3, 4}),     Monomial({}, W{4, 3}),     Monomial({}, W{1, 4}),
      Monomial({}, W{4, 1}),     Monomial({}, W{3, 1}),     Monomial({}, W{1, 3}),
      Monomial({1}, W{3}),       Monomial({2}, W{3}),       Monomial({1}, W{4}),
      Monomial({2}, W{4}),       Monomial({}, W{3, 4, 3}),  Monomial({}, W{4, 3, 4}),
      Monomial({1}, W{3, 4}),    Monomial({2}, W{3, 4}),    Monomial({1}, W{4, 3}),
      Monomial({2}, W{4, 3}),
  };
}

SequenceSet tilted_sequence() {
  auto monomials = build_level_sequence(3, Alphabet::chsh()).monomials();
  for (auto& m : tilted_extra_monomials()) {
    if (std::find(monomials.begin(), monomials.end(), m) == monomials.end()) {
      monomials.push_back(std::move(m));
    }
  }
  return SequenceSet(std::move(monomials));
}

int VariableIndex::add(const MomentKey& key) {
  auto [it, inserted] = ids_.try_emplace(key, static_cast<int>(keys_.size()));
  if (inserted) keys_.push_back(key);
  return it->second;
}

std::optional<int> VariableIndex::find(const MomentKey& key) const {
  auto it = ids_.find(key);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

int VariableIndex::at(const MomentKey& key) const {
  auto id = find(key);
  if (!id) throw InvalidParameter("moment " + to_string(key) + " is not a registered variable");
  return *id;
}

MomentMatrixSkeleton build_moment_skeleton(const SequenceSet& sequence) {
  MomentMatrixSkeleton out{sequence, {}, {}};
  const auto n = sequence.size();
  out.entry_keys.reserve(n * n);
  out.variables.add(moment_key(Monomial{}));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      auto key = moment_key(adjoint(sequence[j]) * sequence[i]);
      out.variables.add(key);
      out.entry_keys.push_back(std::move(key));
    }
  }
  return out;
}

LocalizingSkeleton build_localizing_skeleton(const OperatorPolynomial& localizer,
                                             const SequenceSet& sprime,
                                             MomentMatrixSkeleton& moment) {
  for (const auto& m : sprime) {
    if (!moment.sequence.contains(m)) {
      throw SequenceContainment("localizing sequence element " + to_string(m) +
                                " is not in the moment sequence");
    }
  }
  LocalizingSkeleton out{sprime, hermitian_part(localizer), {}, {}};
  const OperatorPolynomial anti = 0.5 * (localizer - adjoint(localizer));
  const auto n = sprime.size();
  out.entry_forms.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const OperatorPolynomial right = OperatorPolynomial(sprime[i]);
    for (std::size_t j = 0; j < n; ++j) {
      const OperatorPolynomial left = OperatorPolynomial(adjoint(sprime[j]));
      auto form = key_form(left * out.localizer * right);
      for (const auto& [m, c] : form.terms()) moment.variables.add(MomentKey{m});
      out.entry_forms.push_back(std::move(form));
      if (i < j && !anti.empty()) {
        auto skew = prune(key_form(left * anti * right), 1e-14);
        if (skew.empty()) continue;
        for (const auto& [m, c] : skew.terms()) moment.variables.add(MomentKey{m});
        out.hermiticity_forms.push_back(std::move(skew));
      }
    }
  }
  return out;
}

std::set<MomentKey> keys_of(const MomentMatrixSkeleton& skeleton) {
  return {skeleton.entry_keys.begin(), skeleton.entry_keys.end()};
}

std::set<MomentKey> keys_of(const LocalizingSkeleton& skeleton) {
  std::set<MomentKey> out;
  for (const auto& form : skeleton.entry_forms) {
    for (const auto& [m, c] : form.terms()) out.insert(MomentKey{m});
  }
  return out;
}

OperatorPolynomial first_bob_localizer(double mu) {
  using W = Monomial::Word;
  OperatorPolynomial b;
  b.add_term(Monomial({}, W{3, 1}), 1.0);
  b.add_term(Monomial({}, W{3, 2}), 1.0);
  return (1.0 / std::cos(mu)) * b;
}

OperatorPolynomial second_bob_localizer(double mu, SecondLocalizer variant) {
  using W = Monomial::Word;
  const std::uint8_t aux = variant == SecondLocalizer::B4 ? 4 : 3;
  OperatorPolynomial b;
  b.add_term(Monomial({}, W{aux, 1}), 1.0);
  b.add_term(Monomial({}, W{aux, 2}), -1.0);
  return (1.0 / std::sin(mu)) * b;
}

Eigen::MatrixXd fill(const MomentMatrixSkeleton& skeleton,
                     const std::map<MomentKey, double>& moments) {
  const auto n = static_cast<Eigen::Index>(skeleton.dimension());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = lookup(moments, skeleton.key(static_cast<std::size_t>(i),
                                               static_cast<std::size_t>(j)));
    }
  }
  return out;
}

Eigen::MatrixXd fill(const LocalizingSkeleton& skeleton,
                     const std::map<MomentKey, double>& moments) {
  const auto n = static_cast<Eigen::Index>(skeleton.dimension());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& form = skeleton.entry(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      for (const auto& [m, c] : form.terms()) out(i, j) += c * lookup(moments, MomentKey{m});
    }
  }
  return out;
}

std::string export_triplets(const MomentMatrixSkeleton& skeleton) {
  std::ostringstream out;
  const auto n = skeleton.dimension();
  out << "# moment " << n << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      out << i << ' ' << j << ' ' << skeleton.variables.at(skeleton.key(i, j)) << " 1\n";
    }
  }
  return out.str();
}

std::string export_triplets(const LocalizingSkeleton& skeleton, const VariableIndex& variables) {
  std::ostringstream out;
  const auto n = skeleton.dimension();
  out << "# localizing " << n << '\n';
  char coeff[32];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      for (const auto& [m, c] : skeleton.entry(i, j).terms()) {
        std::snprintf(coeff, sizeof(coeff), "%.17g", c);
        out << i << ' ' << j << ' ' << variables.at(MomentKey{m}) << ' ' << coeff << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace distest
