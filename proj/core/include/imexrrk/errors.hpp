// SPDX-FileCopyrightText: Copyright (c) 2026 The imexrrk Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace imexrrk {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad grid size, inconsistent dimensions, unknown names.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Tableau dimensions are inconsistent (A not s x s, b not length s, ...).
class StructuralError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

/// Lookup of a tableau name that is not in the builtin registry.
class UnknownTableauError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

/// Fields living on different grids were combined.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A diagonal solve hit a (numerically) zero denominator.
class SingularSolveError : public Error {
 public:
  using Error::Error;
};

/// The SAV denominator sqrt(E1 + C0) vanished or E1 + C0 < 0.
class SavDegeneracyError : public Error {
 public:
  SavDegeneracyError(const std::string& what, int stage = -1)
      : Error(what), stage_(stage) {}
  /// Zero-based stage index, or -1 outside a stage evaluation.
  int stage() const noexcept { return stage_; }

 private:
  int stage_;
};

/// The relaxation coefficient came out non-positive.
class NonPositiveRelaxationError : public Error {
 public:
  NonPositiveRelaxationError(const std::string& what, double gamma, double tau)
      : Error(what), gamma_(gamma), tau_(tau) {}
  double gamma() const noexcept { return gamma_; }
  double tau() const noexcept { return tau_; }

 private:
  double gamma_;
  double tau_;
};

/// Modified energy increased in a relaxed step. Indicates a bug.
class EnergyIncreaseError : public Error {
 public:
  using Error::Error;
};

/// Wraps a failure inside integrate_to with the step index and time.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, long step, double t_hat)
      : Error(what), step_(step), t_hat_(t_hat) {}
  long step() const noexcept { return step_; }
  double t_hat() const noexcept { return t_hat_; }

 private:
  long step_;
  double t_hat_;
};

}  // namespace imexrrk
