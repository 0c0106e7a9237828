#pragma once

#include <stdexcept>
#include <string>

namespace twistrank {

// Error taxonomy. The CLI maps these onto process exit codes:
// invalid input -> 2, precision exhausted -> 3, I/O -> 4.

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// b is zero, not squarefree, or (where required) shares a prime with D.
class InvalidTwist : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class PrecisionExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A brute-force evaluation would exceed its configured work budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedFamily : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A results file was produced by a different configuration.
class ConfigMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace twistrank
