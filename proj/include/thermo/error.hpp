#pragma once

#include <stdexcept>
#include <string>

namespace thermo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Dimension mismatch between a state vector and the specs describing it.
class DimensionError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Integration blow-up, eigensolver failure and similar (CLI exit code 3).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The mode matrix is too ill-conditioned to invert reliably. Raised for
/// exactly degenerate bath frequencies in the complex route; callers may fall
/// back to time stepping.
class IllConditionedError : public NumericalError {
public:
    IllConditionedError(const std::string& what, double condition)
        : NumericalError(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// Histogram fitting failures (CLI exit code 4).
class FitError : public Error {
public:
    using Error::Error;
};

/// The log-histogram slope is not negative, so no temperature exists.
class NonThermalError : public FitError {
public:
    explicit NonThermalError(double slope)
        : FitError("non-thermal distribution: fitted log-count slope " + std::to_string(slope) +
                   " is not negative"),
          slope_(slope) {}
    double slope() const noexcept { return slope_; }

private:
    double slope_;
};

}  // namespace thermo
