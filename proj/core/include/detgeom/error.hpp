// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace detgeom {

/// Raised when an input violates a precondition (degenerate box, bad
/// parameter, malformed record). Maps to CLI exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when inputs are well formed but the requested quantity is
/// undefined for them (e.g. recall over an empty ground-truth set).
/// Maps to CLI exit code 3.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace detgeom
