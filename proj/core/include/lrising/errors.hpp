#pragma once

#include <stdexcept>
#include <string>

namespace lrising {

// Argument outside the mathematical domain of an operation (x = y in J, odd Taylor order, t <= 0 ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Gamma-function pole, e.g. C(alpha, d) at even alpha.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A lattice sum that does not converge absolutely.
class DivergenceError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Table model queried outside its tabulated range.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Requested derivative order or family feature not supported.
class CapabilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Spin configuration does not cover the support of a test function.
class CoverageError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Problem too large for an exact or budgeted computation.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, std::string diagnostics)
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}
  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace lrising
