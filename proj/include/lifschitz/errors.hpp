#pragma once

#include <stdexcept>
#include <string>

namespace lifschitz {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Inconsistent or impossible combination of otherwise valid inputs.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A free-mode potential was evaluated where sites outside the sampled box contribute.
class CoverageError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Exhaustive enumeration requested for a law without finite support.
class ModeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Refinement sequence that does not behave like a converging discretization.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Densities below the representable range.
class NumericRangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// Too few nonzero observations to form the requested statistic.
class InsufficientStatisticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lifschitz
