#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace thermopiezo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise malformed numeric input.
class InvalidInputError : public Error {
public:
  using Error::Error;
};

/// A tensor that must be symmetric in some index pair is not.
class SymmetryViolationError : public Error {
public:
  SymmetryViolationError(const std::string &what, std::array<int, 3> worst, double violation)
      : Error(what), worst_(worst), violation_(violation) {}

  /// Zero-based index triple with the largest violation (unused slots are -1).
  [[nodiscard]] std::array<int, 3> worst_index() const { return worst_; }
  [[nodiscard]] double violation() const { return violation_; }

private:
  std::array<int, 3> worst_;
  double violation_;
};

/// beta = 0: the thermal variable does not depend on the temperature rate.
class DivisionByZeroError : public Error {
public:
  using Error::Error;
};

/// Malformed material, state or simulation file.
class ParseError : public Error {
public:
  using Error::Error;
};

/// A required key is absent from an input file.
class MissingFieldError : public ParseError {
public:
  explicit MissingFieldError(const std::string &field)
      : ParseError("missing required field \"" + field + "\""), field_(field) {}
  [[nodiscard]] const std::string &field() const { return field_; }

private:
  std::string field_;
};

/// Invalid simulation setup (grid, time step, degenerate coefficients).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Linear solver breakdown or non-finite values during time stepping.
class SolverError : public Error {
public:
  using Error::Error;
};

} // namespace thermopiezo
