#pragma once

#include <stdexcept>
#include <string>

namespace chaoscast {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid parameter or configuration value.
class ConfigError : public Error {
    using Error::Error;
};

/// Matrix/vector shapes do not line up.
class DimensionError : public Error {
    using Error::Error;
};

/// A delay window does not reach far enough into the past.
class InsufficientHistoryError : public Error {
    using Error::Error;
};

/// A time series has too few columns for the requested operation.
class SeriesTooShortError : public Error {
    using Error::Error;
};

/// Ridge system is rank-deficient with lambda = 0.
class SingularSystemError : public Error {
    using Error::Error;
};

/// A state magnitude crossed the divergence guard.
class BlowUpError : public Error {
    using Error::Error;
};

/// An iterative estimate failed its convergence check.
class ConvergenceError : public Error {
    using Error::Error;
};

/// File I/O or format violation.
class IoError : public Error {
    using Error::Error;
};

} // namespace chaoscast
