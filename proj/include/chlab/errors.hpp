#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace chlab {

/// Argument outside the mathematical domain of an operation (t <= 0, x outside [0, pi], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke a structural precondition (length mismatch, source after observation time).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid model or experiment configuration, detected at construction or load.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A time step produced a non-finite field.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(int step, double max_abs);

  int step() const { return step_; }
  double max_abs() const { return max_abs_; }

 private:
  int step_;
  double max_abs_;
};

/// Picard iteration did not reach its tolerance.
class NonConvergenceError : public std::runtime_error {
 public:
  explicit NonConvergenceError(std::vector<double> diffs);

  const std::vector<double>& diffs() const { return diffs_; }

 private:
  std::vector<double> diffs_;
};

/// Samples carry no spread, i.e. the empirical law is an atom.
class DegenerateLawError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace chlab
