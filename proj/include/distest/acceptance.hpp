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

// The acceptance suite: ten numbered checks, each reported PASS or FAIL.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "distest/fidelity.hpp"

#ifndef DISTEST_GOLDEN_DIR
#define DISTEST_GOLDEN_DIR "tests/golden"
#endif

namespace distest {

struct CriterionResult {
  int id = 0;
  std::string group;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::string golden_dir = DISTEST_GOLDEN_DIR;
  /// Group names or criterion numbers; empty runs everything.
  std::vector<std::string> only;
};

/// endpoints, symbolic, sandwich, soundness, monotonicity, strategies,
/// sequences, determinism.
std::vector<std::string> acceptance_groups();

/// Throws InvalidParameter for an unknown `only` entry.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// One `PASS`/`FAIL` line per criterion followed by a summary line.
void print_report(std::ostream& os, const std::vector<CriterionResult>& results);

/// Reads a transcribed fidelity expression. Each non-comment line is
/// `<weight> <signed word> <signed word> ...`, the weight being cc, cs or ss
/// with an optional sign, where c and s are the cosine and sine of the angle;
/// a `scale p/q` line sets the overall factor and `angle pi/8` or
/// `angle theta` says which angle c and s refer to.
FidelityFunctional load_fidelity_transcription(const std::string& path, const Alphabet& alphabet,
                                               double theta);

}  // namespace distest
