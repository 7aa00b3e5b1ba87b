#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lcare {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// CSV / input parsing failure; carries the 1-based offending row.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t row)
        : Error(msg + " (row " + std::to_string(row) + ")"), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class MalformedRow : public ParseError {
public:
    using ParseError::ParseError;
};

class NonPositivePrice : public ParseError {
public:
    using ParseError::ParseError;
};

class DuplicateDate : public ParseError {
public:
    using ParseError::ParseError;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class DegenerateVariance : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

/// Root search / optimizer did not converge; message carries the residual.
class NumericalError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    using Error::Error;
};

class ConfigMismatch : public Error {
public:
    using Error::Error;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

class SingularLevel : public Error {
public:
    using Error::Error;
};

} // namespace lcare
