// Copyright 2026 The twohop Authors.
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

#ifndef TWOHOP_ERROR_HPP_
#define TWOHOP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace twohop {

// Root of every error thrown by the library. The CLI maps the three
// families below onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or configuration supplied by the caller (exit code 1).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Input data that violates a schema or invariant (exit code 2).
class DataError : public Error {
 public:
  using Error::Error;
};

// A remote endpoint failed or returned something unusable (exit code 3).
class RemoteError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace twohop

#endif  // TWOHOP_ERROR_HPP_
