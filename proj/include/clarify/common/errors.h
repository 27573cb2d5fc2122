// Copyright 2026 The Authors.
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

#ifndef CLARIFY_COMMON_ERRORS_H_
#define CLARIFY_COMMON_ERRORS_H_

#include <stdexcept>
#include <string>

namespace clarify {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file or payload.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a data invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Caller broke an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// No label in the inventory intersects the query's potential intents.
class NoCandidatesError : public Error {
 public:
  using Error::Error;
};

// Every label is masked, so the policy has nothing to choose from.
class NoActionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Unknown session or other missing service resource.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Request not legal in the session's current state.
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace clarify

#endif  // CLARIFY_COMMON_ERRORS_H_
