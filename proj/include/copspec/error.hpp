#pragma once

#include <stdexcept>
#include <string>

namespace copspec {

// Bad arguments or data violating a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A model that the requested operation cannot handle (e.g. a GARCH spec
// passed to the Gaussian reference spectrum).
class UnsupportedModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameter estimation failed on every start.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite objective values and similar numerical breakdowns.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed files: CSV input, config text, persisted ensembles.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace copspec
