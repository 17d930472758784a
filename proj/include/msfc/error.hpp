/* Copyright 2026 The msfc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <stdexcept>
#include <string>

namespace msfc {

// Every failure the core reports derives from Error so the C API can map the
// dynamic type onto a status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Raw-state error rate at or above 1/(3k+8): distillation never succeeds.
class YieldThresholdError : public Error {
 public:
  using Error::Error;
};

// No feasible answer exists (code distance above the scan limit, a grid split
// that cannot hold its vertices, unsatisfiable port wiring).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// A gate cannot be routed even on an empty mesh.
class UnroutableError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace msfc
