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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "distest/errors.hpp"
#include "distest/fidelity.hpp"
#include "distest/relaxation.hpp"
#include "distest/strategy.hpp"

namespace distest {
namespace {

constexpr double kPi = std::numbers::pi;

Monomial M(const char* text) { return parse_monomial(text, Alphabet::tilted()); }

double min_eigenvalue(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
}

// Independent enumeration over plain strings: every word of length <= level
// over the letters, Alice letters moved to the front, adjacent repeats
// cancelled, rendered in the library's text format.
std::set<std::string> brute_force_words(int level, int alice, int bob) {
  std::vector<std::string> letters;
  for (int x = 1; x <= alice; ++x) letters.push_back("A" + std::to_string(x));
  for (int y = 1; y <= bob; ++y) letters.push_back("B" + std::to_string(y));
  auto reduce = [](const std::vector<std::string>& w) {
    std::vector<std::string> out;
    for (const auto& l : w) {
      if (!out.empty() && out.back() == l) {
        out.pop_back();
      } else {
        out.push_back(l);
      }
    }
    return out;
  };
  auto join = [](const std::vector<std::string>& w) {
    std::string s;
    for (const auto& l : w) s += (s.empty() ? "" : ".") + l;
    return s;
  };
  std::set<std::string> out;
  std::vector<std::vector<std::string>> frontier{{}};
  for (int len = 0; len <= level; ++len) {
    std::vector<std::vector<std::string>> next;
    for (const auto& w : frontier) {
      std::vector<std::string> a, b;
      for (const auto& l : w) (l[0] == 'A' ? a : b).push_back(l);
      const auto ja = join(reduce(a)), jb = join(reduce(b));
      out.insert(ja.empty() && jb.empty() ? "1" : ja.empty() ? jb : jb.empty() ? ja : ja + "*" + jb);
      for (const auto& l : letters) {
        auto longer = w;
        longer.push_back(l);
        next.push_back(std::move(longer));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

std::set<std::string> rendered(const SequenceSet& s) {
  std::set<std::string> out;
  for (const auto& m : s) out.insert(to_string(m));
  return out;
}

TEST(LevelSequence, ChshSizes) {
  EXPECT_EQ(build_level_sequence(1, Alphabet::chsh()).size(), 5u);
  EXPECT_EQ(build_level_sequence(2, Alphabet::chsh()).size(), 13u);
  EXPECT_EQ(build_level_sequence(3, Alphabet::chsh()).size(), 25u);
}

TEST(LevelSequence, MatchesBruteForceEnumeration) {
  for (int level = 1; level <= 4; ++level) {
    EXPECT_EQ(rendered(build_level_sequence(level, Alphabet::chsh())), brute_force_words(level, 2, 2))
        << "level " << level;
  }
  EXPECT_EQ(rendered(build_level_sequence(2, Alphabet::tilted())), brute_force_words(2, 2, 4));
}

// Total length first, then Alice length, so Bob-only words lead each length.
TEST(LevelSequence, LevelOneListing) {
  const auto s = build_level_sequence(1, Alphabet::chsh());
  const std::vector<Monomial> expected{Monomial{}, M("B1"), M("B2"), M("A1"), M("A2")};
  EXPECT_EQ(s.monomials(), expected);
}

TEST(LevelSequence, OrderedIdentityFirstAndNested) {
  for (int level = 1; level <= 3; ++level) {
    const auto s = build_level_sequence(level, Alphabet::chsh());
    EXPECT_TRUE(s[0].is_identity());
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    const auto bigger = build_level_sequence(level + 1, Alphabet::chsh());
    for (const auto& m : s) EXPECT_TRUE(bigger.contains(m)) << to_string(m);
  }
}

TEST(LevelSequence, RejectsLevelZero) {
  EXPECT_THROW(build_level_sequence(0, Alphabet::chsh()), InvalidParameter);
}

TEST(SequenceSet, RejectsDuplicatesAndMissingIdentity) {
  EXPECT_THROW(SequenceSet({Monomial{}, M("A1"), M("A1")}), InvalidParameter);
  EXPECT_THROW(SequenceSet({M("A1"), Monomial{}}), InvalidParameter);
}

TEST(TiltedSequence, SizeAndExtras) {
  const auto s = tilted_sequence();
  EXPECT_EQ(s.size(), 41u);
  EXPECT_TRUE(s[0].is_identity());
  EXPECT_TRUE(s.contains(M("A2B4B3")));
  const char* extras[] = {"B3B4",   "B4B3",   "B1B4",   "B4B1",   "B3B1",   "B1B3",
                          "A1B3",   "A2B3",   "A1B4",   "A2B4",   "B3B4B3", "B4B3B4",
                          "A1B3B4", "A2B3B4", "A1B4B3", "A2B4B3"};
  for (const char* e : extras) EXPECT_TRUE(s.contains(M(e))) << e;
  for (const auto& m : build_level_sequence(3, Alphabet::chsh())) EXPECT_TRUE(s.contains(m));
}

TEST(MomentSkeleton, TwoElementExample) {
  const auto sk = build_moment_skeleton(SequenceSet({Monomial{}, M("A1")}));
  EXPECT_EQ(sk.dimension(), 2u);
  EXPECT_EQ(sk.variables.size(), 2u);
  EXPECT_EQ(sk.key(0, 0), moment_key(Monomial{}));
  EXPECT_EQ(sk.key(0, 1), moment_key(M("A1")));
  EXPECT_EQ(sk.key(1, 0), moment_key(M("A1")));
  EXPECT_EQ(sk.key(1, 1), moment_key(Monomial{}));
}

TEST(MomentSkeleton, LevelTwoCancellationEntry) {
  const auto s = build_level_sequence(2, Alphabet::chsh());
  const auto sk = build_moment_skeleton(s);
  const auto row = *s.index_of(M("A1A2"));
  const auto col = *s.index_of(M("A1"));
  EXPECT_EQ(sk.key(row, col), moment_key(M("A2")));
}

TEST(MomentSkeleton, SymmetricWithOneVariablePerKey) {
  for (const auto& s : {build_level_sequence(2, Alphabet::chsh()),
                        build_level_sequence(3, Alphabet::chsh()), tilted_sequence()}) {
    const auto sk = build_moment_skeleton(s);
    EXPECT_EQ(sk.key(0, 0), moment_key(Monomial{}));
    for (std::size_t i = 0; i < sk.dimension(); ++i) {
      for (std::size_t j = 0; j < sk.dimension(); ++j) {
        EXPECT_EQ(sk.key(i, j), moment_key(adjoint(s[j]) * s[i]));
        EXPECT_EQ(sk.key(i, j), sk.key(j, i));
      }
    }
    EXPECT_EQ(sk.variables.size(), keys_of(sk).size());
  }
}

TEST(MomentSkeleton, OptimalChshFillIsPsd) {
  const auto sk = build_moment_skeleton(build_level_sequence(3, Alphabet::chsh()));
  const auto g = fill(sk, populate_moments(chsh_optimal_strategy(), keys_of(sk)));
  EXPECT_DOUBLE_EQ(g(0, 0), 1.0);
  EXPECT_GE(min_eigenvalue(g), -1e-9);
}

TEST(MomentSkeleton, FillRejectsMissingMoment) {
  const auto sk = build_moment_skeleton(SequenceSet({Monomial{}, M("A1")}));
  EXPECT_THROW(fill(sk, {{moment_key(Monomial{}), 1.0}}), InvalidParameter);
}

TEST(LocalizingSkeleton, IdentityLocalizerReproducesMomentSkeleton) {
  const auto s = build_level_sequence(3, Alphabet::chsh());
  auto moment = build_moment_skeleton(s);
  const auto loc = build_localizing_skeleton(OperatorPolynomial::constant(1.0), s, moment);
  EXPECT_TRUE(loc.hermiticity_forms.empty());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      const auto& form = loc.entry(i, j);
      ASSERT_EQ(form.size(), 1u);
      EXPECT_EQ(MomentKey{form.terms().begin()->first}, moment.key(i, j));
      EXPECT_DOUBLE_EQ(form.terms().begin()->second, 1.0);
    }
  }
}

TEST(LocalizingSkeleton, SingleEntryExpansion) {
  const double mu = 0.6;
  auto moment = build_moment_skeleton(tilted_sequence());
  const auto loc = build_localizing_skeleton(first_bob_localizer(mu), SequenceSet({Monomial{}}), moment);
  ASSERT_EQ(loc.dimension(), 1u);
  const auto& form = loc.entry(0, 0);
  EXPECT_EQ(form.size(), 2u);
  EXPECT_NEAR(form.coefficient(moment_key(M("B1B3")).representative), 1.0 / std::cos(mu), 1e-15);
  EXPECT_NEAR(form.coefficient(moment_key(M("B2B3")).representative), 1.0 / std::cos(mu), 1e-15);

  // Same entry against a direct evaluation of the four symmetrized words.
  const auto s = tilted_optimal_strategy(kPi / 7);
  const double direct = (evaluate_word(s, M("B3B1")) + evaluate_word(s, M("B1B3")) +
                         evaluate_word(s, M("B3B2")) + evaluate_word(s, M("B2B3"))) /
                        (2.0 * std::cos(mu));
  EXPECT_NEAR(fill(loc, populate_moments(s, keys_of(loc)))(0, 0), direct, 1e-12);
}

TEST(LocalizingSkeleton, HermiticityFormsVanishOnStrategies) {
  const auto s = tilted_optimal_strategy(kPi / 9);
  const double mu = mu_from_theta(kPi / 9);
  auto moment = build_moment_skeleton(tilted_sequence());
  const auto loc = build_localizing_skeleton(second_bob_localizer(mu), tilted_sequence(), moment);
  EXPECT_FALSE(loc.hermiticity_forms.empty());
  for (const auto& form : loc.hermiticity_forms) {
    double value = 0.0;
    for (const auto& [m, c] : form.terms()) value += c * evaluate_word(s, m);
    EXPECT_NEAR(value, 0.0, 1e-12) << to_string(form);
  }
}

TEST(LocalizingSkeleton, ContainmentViolationThrows) {
  auto moment = build_moment_skeleton(build_level_sequence(3, Alphabet::chsh()));
  EXPECT_THROW(build_localizing_skeleton(first_bob_localizer(0.5), SequenceSet({Monomial{}, M("B3")}),
                                         moment),
               SequenceContainment);
}

TEST(LocalizingSkeleton, RegistersEveryKeyInSharedIndex) {
  auto moment = build_moment_skeleton(tilted_sequence());
  const auto before = moment.variables.size();
  const auto loc = build_localizing_skeleton(first_bob_localizer(0.5), tilted_sequence(), moment);
  EXPECT_GT(moment.variables.size(), before);
  for (const auto& key : keys_of(loc)) EXPECT_TRUE(moment.variables.find(key).has_value());
}

TEST(LocalizingSkeleton, LiteralVariantUsesB3) {
  const auto b4 = second_bob_localizer(0.5);
  const auto b3 = second_bob_localizer(0.5, SecondLocalizer::LiteralB3);
  EXPECT_NEAR(b4.coefficient(M("B4B1")), 1.0 / std::sin(0.5), 1e-15);
  EXPECT_NEAR(b4.coefficient(M("B4B2")), -1.0 / std::sin(0.5), 1e-15);
  EXPECT_NEAR(b3.coefficient(M("B3B1")), 1.0 / std::sin(0.5), 1e-15);
  EXPECT_DOUBLE_EQ(b3.coefficient(M("B4B1")), 0.0);
}

// Soundness: every strategy fills all blocks with PSD matrices.
TEST(Soundness, TiltedStrategiesFillPsdBlocks) {
  for (int k = 1; k <= 10; ++k) {
    const double theta = k * (kPi / 4) / 10;
    const double mu = mu_from_theta(theta);
    auto moment = build_moment_skeleton(tilted_sequence());
    const auto first = build_localizing_skeleton(first_bob_localizer(mu), tilted_sequence(), moment);
    const auto second = build_localizing_skeleton(second_bob_localizer(mu), tilted_sequence(), moment);
    for (double v : {1.0, 0.7, 0.0}) {
      const auto s = with_visibility(tilted_optimal_strategy(theta), v);
      const auto values = populate_moments(s, std::set<MomentKey>(moment.variables.keys().begin(),
                                                                  moment.variables.keys().end()));
      EXPECT_GE(min_eigenvalue(fill(moment, values)), -1e-9) << theta << ' ' << v;
      EXPECT_GE(min_eigenvalue(fill(first, values)), -1e-9) << theta << ' ' << v;
      EXPECT_GE(min_eigenvalue(fill(second, values)), -1e-9) << theta << ' ' << v;
    }
  }
}

TEST(Soundness, ChshStrategiesFillPsdMomentMatrix) {
  const auto sk = build_moment_skeleton(build_level_sequence(3, Alphabet::chsh()));
  for (const auto& s : {chsh_optimal_strategy(), werner_strategy(0.3), werner_strategy(0.0),
                        deterministic_strategy()}) {
    EXPECT_GE(min_eigenvalue(fill(sk, populate_moments(s, keys_of(sk)))), -1e-9);
  }
}

TEST(Coverage, ChshFidelityMonomialsAreMomentEntries) {
  const auto keys = keys_of(build_moment_skeleton(build_level_sequence(3, Alphabet::chsh())));
  const auto f = chsh_fidelity();
  for (const auto& [m, c] : f.polynomial.terms()) {
    EXPECT_TRUE(keys.contains(moment_key(m))) << to_string(m);
  }
}

TEST(Coverage, TiltedFidelityMonomialsAreCovered) {
  const double theta = kPi / 8;
  const double mu = mu_from_theta(theta);
  auto moment = build_moment_skeleton(tilted_sequence());
  auto keys = keys_of(moment);
  for (const auto& loc : {build_localizing_skeleton(first_bob_localizer(mu), tilted_sequence(), moment),
                          build_localizing_skeleton(second_bob_localizer(mu), tilted_sequence(), moment)}) {
    const auto more = keys_of(loc);
    keys.insert(more.begin(), more.end());
  }
  const auto f = tilted_fidelity(theta);
  for (const auto& [m, c] : f.polynomial.terms()) {
    EXPECT_TRUE(keys.contains(moment_key(m))) << to_string(m);
  }
}

TEST(Export, TripletCounts) {
  auto moment = build_moment_skeleton(build_level_sequence(1, Alphabet::chsh()));
  const std::string text = export_triplets(moment);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# moment 5");
  int count = 0;
  while (std::getline(in, line)) ++count;
  EXPECT_EQ(count, 15);
  EXPECT_NE(text.find("0 0 0 1\n"), std::string::npos);

  const auto loc = build_localizing_skeleton(first_bob_localizer(0.5), SequenceSet({Monomial{}}),
                                             moment);
  EXPECT_EQ(export_triplets(loc, moment.variables).rfind("# localizing 1\n", 0), 0u);
}

}  // namespace
}  // namespace distest
