#pragma once

#include <stdexcept>
#include <string>

namespace rmtcorr {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclass onto an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a structural contract (asymmetric matrix, unnormalized
/// vector, non-positive price).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numeric argument is outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// The data itself cannot support the request: malformed rows, too few
/// dates, missing cells, zero-variance series.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t row, const std::string& what)
      : DataError("row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

class MissingDataError : public DataError {
 public:
  using DataError::DataError;
};

class LeadingGapError : public DataError {
 public:
  explicit LeadingGapError(const std::string& ticker)
      : DataError("ticker '" + ticker + "' has no observed price on the first date"),
        ticker_(ticker) {}

  const std::string& ticker() const noexcept { return ticker_; }

 private:
  std::string ticker_;
};

class ZeroVolatilityError : public DataError {
 public:
  explicit ZeroVolatilityError(const std::string& ticker)
      : DataError("ticker '" + ticker + "' has zero return variance"), ticker_(ticker) {}

  const std::string& ticker() const noexcept { return ticker_; }

 private:
  std::string ticker_;
};

/// Factor-model parameters that admit no (or almost no) draws satisfying
/// the unit-variance constraint.
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace rmtcorr
