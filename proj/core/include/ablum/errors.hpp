#pragma once

#include <stdexcept>

namespace ablum {

// Invalid or out-of-range configuration. Messages name the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A transition from an AFT to itself was evaluated.
class InvalidTransition : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Neighbour fraction requested for a cell without neighbours.
class UndefinedFraction : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Sobol estimation on an output with zero variance.
class DegenerateVariance : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ablum
