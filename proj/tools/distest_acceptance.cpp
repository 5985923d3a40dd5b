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

// Runs the acceptance suite: one PASS/FAIL line per criterion. Arguments are
// forwarded to `distest verify` (--only, --golden-dir).

#include <iostream>
#include <string>
#include <vector>

#include "distest/cli.hpp"

int main(int argc, char** argv) {
  std::vector<const char*> args{argv[0], "verify"};
  for (int i = 1; i < argc; ++i) args.push_back(argv[i]);
  return distest::cli::run(static_cast<int>(args.size()), args.data(), std::cout, std::cerr);
}
