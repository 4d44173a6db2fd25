#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace psd {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed files, invalid parameters, violated preconditions.
/// The CLI maps these to exit code 1.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation (e.g. a quantile
/// level outside (0, 1)).
class DomainError : public InputError {
 public:
  using InputError::InputError;
};

/// Numerical failure. The CLI maps these to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An evaluation point sits on (or within the guard distance of) a pole.
/// `index` identifies the offending eigenvalue or atom; `location` is the
/// eigenvalue, atom, or support point involved.
class PoleError : public NumericalError {
 public:
  PoleError(const std::string& what, std::size_t index, double location, double distance)
      : NumericalError(what), index_(index), location_(location), distance_(distance) {}

  std::size_t index() const noexcept { return index_; }
  double location() const noexcept { return location_; }
  /// Distance from the pole in the relevant metric (|lambda - u| or |1 + a s|).
  double distance() const noexcept { return distance_; }

 private:
  std::size_t index_;
  double location_;
  double distance_;
};

class IterationError : public NumericalError {
 public:
  IterationError(const std::string& what, double residual, int iterations)
      : NumericalError(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Support scan found two sign changes of du/ds inside one grid cell.
class RefinementError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RankError : public NumericalError {
 public:
  RankError(const std::string& what, long rank) : NumericalError(what), rank_(rank) {}
  long rank() const noexcept { return rank_; }

 private:
  long rank_;
};

class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// CLI exit code for an exception: 1 for input errors, 2 for numerical ones.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace psd
