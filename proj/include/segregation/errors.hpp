#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace segregation {

/// Invalid geometry: overlapping balls, bad corridors, unresolved widths.
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IndexError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// Two fields (or a field and an operator) live on different grids.
class DomainMismatchError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class LinearSolveError : public std::runtime_error {
public:
  LinearSolveError(const std::string& what, double achieved_residual, int iterations)
      : std::runtime_error(what), residual_(achieved_residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

private:
  double residual_;
  int iterations_;
};

class EigenSolveError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when a Newton-type iteration cannot reduce the residual any further.
/// Carries the residual history so callers can report where it stalled.
class NonlinearSolveError : public std::runtime_error {
public:
  NonlinearSolveError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}

  const std::vector<double>& residual_history() const noexcept { return history_; }
  double last_residual() const noexcept { return history_.empty() ? -1.0 : history_.back(); }

private:
  std::vector<double> history_;
};

/// The supersolution does not exist because lambda does not exceed the
/// principal eigenvalue of the domain.
class PhiUnavailable : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A species has no positive single-ball state (lambda at or below the
/// principal eigenvalue of its ball).
class BaselineUnavailable : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A baseline state fails the nondegeneracy condition (margin <= 0).
class NDFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace segregation
