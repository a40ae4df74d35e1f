#pragma once

#include <stdexcept>

namespace mramsim {

/// Invalid configuration or input files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fitted constant is required but the configuration has not been
/// calibrated.
class UncalibratedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A calibration target cannot be reached within the parameter bounds.
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mramsim
