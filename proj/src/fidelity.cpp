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

#include "distest/fidelity.hpp"

#include <cmath>
#include <numbers>

#include "distest/errors.hpp"

namespace distest {
namespace {

// One bracket of a closed-form fidelity: weight * (sum of signed words).
struct Bracket {
  double weight;
  std::array<std::pair<int, const char*>, 4> words;
};

OperatorPolynomial sum_brackets(std::span<const Bracket> brackets, double prefactor,
                                const Alphabet& alphabet) {
  OperatorPolynomial out;
  for (const auto& bracket : brackets) {
    for (const auto& [sign, word] : bracket.words) {
      out.add_term(parse_monomial(word, alphabet), prefactor * bracket.weight * sign);
    }
  }
  return out;
}

}  // namespace

ChoiBlockGrid choi_blocks(OperatorLetter first, OperatorLetter second) {
  if (first.party != second.party) {
    throw InvalidLetter("Choi blocks need two letters of the same party");
  }
  const auto letter = [](OperatorLetter l) {
    return l.party == Party::Alice ? Monomial({l.index}, {}) : Monomial({}, {l.index});
  };
  const OperatorPolynomial one = OperatorPolynomial::constant(1.0);
  const OperatorPolynomial f(letter(first));
  const OperatorPolynomial s(letter(second));
  ChoiBlockGrid grid;
  grid.party = first.party;
  grid.blocks[0][0] = 0.5 * (one + f);
  grid.blocks[0][1] = 0.5 * (s - s * f);
  grid.blocks[1][0] = 0.5 * (s - f * s);
  grid.blocks[1][1] = 0.5 * (one - f);
  return grid;
}

ReferenceState::ReferenceState(const std::array<double, 4>& amplitudes) : amplitudes_(amplitudes) {
  double norm = 0.0;
  for (double a : amplitudes_) norm += a * a;
  if (std::abs(norm - 1.0) > 1e-12) {
    throw InvalidParameter("reference state is not normalized (|psi|^2 = " +
                           std::to_string(norm) + ")");
  }
}

ReferenceState ReferenceState::chsh() {
  const auto psi = chsh_reference_vector<double>();
  return ReferenceState({psi(0), psi(1), psi(2), psi(3)});
}

ReferenceState ReferenceState::tilted(double theta) {
  TiltedParameters::from_theta(theta);  // range check
  return ReferenceState({std::cos(theta), 0.0, 0.0, std::sin(theta)});
}

FidelityFunctional fidelity_polynomial(const ReferenceState& ref, const ChoiBlockGrid& alice,
                                       const ChoiBlockGrid& bob) {
  if (alice.party != Party::Alice || bob.party != Party::Bob) {
    throw InvalidLetter("fidelity needs an Alice grid and a Bob grid");
  }
  OperatorPolynomial out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
          const double weight = ref.amplitude(i, k) * ref.amplitude(j, l);
          if (weight == 0.0) continue;
          out += weight * (alice(i, j) * bob(k, l));
        }
      }
    }
  }
  return {prune(hermitian_part(out), 1e-14)};
}

FidelityFunctional chsh_fidelity() {
  return fidelity_polynomial(ReferenceState::chsh(), choi_blocks(A(1), A(2)),
                             choi_blocks(B(1), B(2)));
}

FidelityFunctional tilted_fidelity(double theta) {
  return fidelity_polynomial(ReferenceState::tilted(theta), choi_blocks(A(1), A(2)),
                             choi_blocks(B(3), B(4)));
}

FidelityFunctional chsh_fidelity_oracle() {
  const double c = std::cos(std::numbers::pi / 8);
  const double s = std::sin(std::numbers::pi / 8);
  const double cc = c * c, cs = c * s, ss = s * s;
  // Sixteen brackets in the order |00><00|, |00><01|, ..., |11><11|.
  const Bracket brackets[] = {
      {cc, {{{+1, "A1"}, {+1, "B1"}, {+1, "A1B1"}, {+1, "1"}}}},
      {cs, {{{+1, "B2"}, {+1, "A1B2"}, {-1, "B2B1"}, {-1, "A1B2B1"}}}},
      {cs, {{{+1, "B2"}, {+1, "A1B2"}, {-1, "B1B2"}, {-1, "A1B1B2"}}}},
      {ss, {{{+1, "A1"}, {-1, "B1"}, {-1, "A1B1"}, {+1, "1"}}}},
      {cs, {{{+1, "A2"}, {-1, "A2A1"}, {+1, "A2B1"}, {-1, "A2A1B1"}}}},
      {-cc, {{{+1, "A2B2"}, {-1, "A2A1B2"}, {-1, "A2B2B1"}, {+1, "A2A1B2B1"}}}},
      {ss, {{{+1, "A2B2"}, {-1, "A2A1B2"}, {-1, "A2B1B2"}, {+1, "A2A1B1B2"}}}},
      {-cs, {{{+1, "A2"}, {-1, "A2A1"}, {-1, "A2B1"}, {+1, "A2A1B1"}}}},
      {cs, {{{+1, "A2"}, {-1, "A1A2"}, {+1, "A2B1"}, {-1, "A1A2B1"}}}},
      {ss, {{{+1, "A2B2"}, {-1, "A1A2B2"}, {-1, "A2B2B1"}, {+1, "A1A2B2B1"}}}},
      {-cc, {{{+1, "A2B2"}, {-1, "A1A2B2"}, {-1, "A2B1B2"}, {+1, "A1A2B1B2"}}}},
      {-cs, {{{+1, "A2"}, {-1, "A1A2"}, {-1, "A2B1"}, {+1, "A1A2B1"}}}},
      {ss, {{{+1, "B1"}, {-1, "A1"}, {-1, "A1B1"}, {+1, "1"}}}},
      {-cs, {{{+1, "B2"}, {-1, "A1B2"}, {-1, "B2B1"}, {+1, "A1B2B1"}}}},
      {-cs, {{{+1, "B2"}, {-1, "A1B2"}, {-1, "B1B2"}, {+1, "A1B1B2"}}}},
      {cc, {{{+1, "A1B1"}, {-1, "B1"}, {-1, "A1"}, {+1, "1"}}}},
  };
  // Cancellations such as (c^2 + s^2) - s^2 - c^2 leave rounding residue.
  return {prune(sum_brackets(brackets, 1.0 / 8.0, Alphabet::chsh()), 1e-14)};
}

FidelityFunctional tilted_fidelity_oracle(double theta) {
  TiltedParameters::from_theta(theta);  // range check
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Bracket brackets[] = {
      {c * c, {{{+1, "1"}, {+1, "A1"}, {+1, "B3"}, {+1, "A1B3"}}}},
      {c * s, {{{+1, "A2B4"}, {-1, "A2B4B3"}, {-1, "A2A1B4"}, {+1, "A2A1B4B3"}}}},
      {c * s, {{{+1, "A2B4"}, {-1, "A2B3B4"}, {-1, "A1A2B4"}, {+1, "A1A2B3B4"}}}},
      {s * s, {{{+1, "1"}, {-1, "A1"}, {-1, "B3"}, {+1, "A1B3"}}}},
  };
  return {prune(sum_brackets(brackets, 1.0 / 4.0, Alphabet::tilted()), 1e-14)};
}

}  // namespace distest
