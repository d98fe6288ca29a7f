// Copyright 2026 The pipeint Authors
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

#ifndef PIPEINT_ERRORS_HPP_
#define PIPEINT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pipeint {

// Malformed or out-of-range input: bad shapes, bad parameters, invalid files.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A discretization or enumeration would exceed its configured size cap.
class SizeCapError : public std::runtime_error {
 public:
  explicit SizeCapError(const std::string& what)
      : std::runtime_error(what) {}
};

// Internal numerical failure (e.g. the LP solver did not reach optimality).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pipeint

#endif  // PIPEINT_ERRORS_HPP_
