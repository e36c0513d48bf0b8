// Copyright 2026 The LowSwitch Authors. All Rights Reserved.
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

#ifndef LOWSWITCH_ERRORS_H_
#define LOWSWITCH_ERRORS_H_

#include <stdexcept>
#include <string>

namespace lowswitch {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters or malformed input data (configs, spec files, dimensions).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A documented precondition or runtime invariant does not hold.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Linear algebra produced a result outside its accuracy budget.
class NumericalFault : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lowswitch

#endif  // LOWSWITCH_ERRORS_H_
