#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tickwork {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates a documented precondition or model invariant.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of a closed-form expression.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A formula is only valid for a restricted case that was not met.
class UnsupportedCase : public Error {
 public:
  using Error::Error;
};

/// Too few ticks/samples to form the requested statistic.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Ledger and tick series describe different numbers of cycles.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf (or a state leaving its physical manifold) during integration.
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(const std::string& what, std::size_t step, double time)
      : Error(what + " (step " + std::to_string(step) + ", t=" + std::to_string(time) + ")"),
        step_(step),
        time_(time) {}

  std::size_t step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t step_;
  double time_;
};

/// Failure of one trial inside an ensemble; carries the trial index.
class TrialError : public Error {
 public:
  TrialError(std::size_t trial, const std::string& what, bool numerical)
      : Error("trial " + std::to_string(trial) + ": " + what), trial_(trial), numerical_(numerical) {}

  std::size_t trial() const noexcept { return trial_; }
  /// True when the underlying cause was a NumericalBlowup.
  bool numerical() const noexcept { return numerical_; }

 private:
  std::size_t trial_;
  bool numerical_;
};

}  // namespace tickwork
