// Copyright 2026 dcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace dcal {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid caller-supplied data: out-of-domain values, malformed files,
// incompatible parameters.  The CLI maps this to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

// A numeric failure inside an algorithm that cannot happen on valid input
// (e.g. an LP that is feasible by construction reporting infeasible).  The
// CLI maps this to exit code 3.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace dcal
