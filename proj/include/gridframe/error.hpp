#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gridframe {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: configuration values, malformed files, mismatched lengths.
class ValidationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DimensionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Failures of the numerics themselves.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The adaptive weights left the finite range.
class DivergenceError : public NumericalError {
public:
    DivergenceError(std::int64_t sample_index, const std::string& what)
        : NumericalError("diverged at sample " + std::to_string(sample_index) + ": " + what),
          sample_index_(sample_index) {}

    std::int64_t sample_index() const noexcept { return sample_index_; }

private:
    std::int64_t sample_index_;
};

/// |kappa| >= 1: the negative sequence dominates and the balancing map is singular.
class ImbalanceOverflowError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace gridframe
