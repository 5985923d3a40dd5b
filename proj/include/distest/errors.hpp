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

#pragma once

#include <stdexcept>
#include <string>

namespace distest {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A letter index outside the alphabet, or a letter missing from a strategy.
class InvalidLetter : public Error {
 public:
  using Error::Error;
};

/// A numeric parameter outside its admissible range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A localizing sequence not contained in the moment sequence, or an
/// objective monomial not covered by any PSD block.
class SequenceContainment : public Error {
 public:
  using Error::Error;
};

/// Malformed text input (monomial/polynomial grammar, config files).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace distest
