#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vbpbb {

/// Problems with the input data itself (CLI exit code 2).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Problems with parameters or configuration (CLI exit code 3).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidPeriod : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class InvalidParameter : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class BoundsError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class DuplicateFrequency : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class IncompatibleEnsembles : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// The passband needed to isolate a component does not fit in the series.
class InfeasibleBandwidth : public ConfigError {
public:
    InfeasibleBandwidth(const std::string& what, std::int64_t min_length)
        : ConfigError(what), min_length_(min_length)
    {
    }
    std::int64_t min_length() const noexcept { return min_length_; }

private:
    std::int64_t min_length_;
};

class InsufficientData : public DataError {
public:
    using DataError::DataError;
};

class IncompleteCycle : public DataError {
public:
    using DataError::DataError;
};

class InsufficientCycles : public DataError {
public:
    using DataError::DataError;
};

class UndefinedCorrelation : public DataError {
public:
    using DataError::DataError;
};

class ParseError : public DataError {
public:
    using DataError::DataError;
};

class GapError : public DataError {
public:
    using DataError::DataError;
};

class DuplicateDate : public DataError {
public:
    using DataError::DataError;
};

} // namespace vbpbb
