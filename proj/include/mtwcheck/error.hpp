#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mtw {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed expressions, violated preconditions, bad configs.
class DomainError : public Error {
public:
    using Error::Error;
};

class ParseError : public DomainError {
public:
    enum class Kind { Syntax, UnknownIdentifier, DimensionMismatch };

    ParseError(Kind kind, std::size_t offset, const std::string& message)
        : DomainError(message + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

    Kind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

/// Unusable run configuration or command line.
class ConfigError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Numerical failure of an otherwise well-posed request.
class NumericalError : public Error {
public:
    using Error::Error;
};

class ConjugatePointError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ShootingError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateMetricError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class CalibrationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace mtw
