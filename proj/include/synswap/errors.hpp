// Copyright 2026 The synswap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace synswap {

/// Bad input: out-of-range parameter, malformed scenario, dimension mismatch.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
  public:
    explicit ValidationError(const std::string &what) : std::invalid_argument(what) {}
};

/// Valid input that cannot be carried through, e.g. unlocked lasers.
/// The CLI maps this to exit code 3.
class RuntimeError : public std::runtime_error {
  public:
    explicit RuntimeError(const std::string &what) : std::runtime_error(what) {}
};

/// The two lasers do not reach a stable timing fixed point.
class NotLockedError : public RuntimeError {
  public:
    explicit NotLockedError(const std::string &what) : RuntimeError("not locked: " + what) {}
};

/// A measurement outcome with vanishing probability; no conditional state exists.
class NullOutcomeError : public RuntimeError {
  public:
    explicit NullOutcomeError(double probability)
        : RuntimeError("null outcome: probability " + std::to_string(probability)),
          probability_(probability) {}

    double probability() const noexcept { return probability_; }

  private:
    double probability_;
};

} // namespace synswap
