#pragma once

#include <stdexcept>
#include <string>

namespace retrialq {

// Error categories, grouped by how the CLI reports them:
//   ConfigError       -> exit 2 (bad input / schema / invalid parameters)
//   NumericalError    -> exit 3 (computation refused rather than returning noise)
//   InsufficientData  -> exit 4 (not enough observations to estimate)
//   ConvergenceError  -> exit 5 (iteration failed to reach tolerance)

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidDimensions : ConfigError {
    using ConfigError::ConfigError;
};

struct NonPositiveRate : ConfigError {
    using ConfigError::ConfigError;
};

struct NonPositiveLoad : ConfigError {
    using ConfigError::ConfigError;
};

struct InvalidK : ConfigError {
    using ConfigError::ConfigError;
};

struct NonPositiveHorizon : ConfigError {
    using ConfigError::ConfigError;
};

struct UnsupportedFamily : ConfigError {
    using ConfigError::ConfigError;
};

struct NumericalInstability : NumericalError {
    using NumericalError::NumericalError;
};

struct TooFewCycles : InsufficientData {
    using InsufficientData::InsufficientData;
};

struct ZeroDenominator : InsufficientData {
    using InsufficientData::InsufficientData;
};

} // namespace retrialq
