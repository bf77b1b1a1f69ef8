#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace ncorr {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument outside its mathematical domain.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed, inconsistent, or insufficient data (files, datasets, series).
class DataError : public Error {
public:
    using Error::Error;
};

/// Numerical solver failure. Carries the step index and simulation time
/// when the failure happened inside a time loop (-1 / NaN otherwise).
class SolverError : public Error {
public:
    explicit SolverError(const std::string& msg, long step = -1,
                         double time = std::numeric_limits<double>::quiet_NaN())
        : Error(msg), step_(step), time_(time) {}

    long step() const { return step_; }
    double time() const { return time_; }

private:
    long step_;
    double time_;
};

/// Euler-angle kinematic singularity (pitch too close to +/-pi/2).
class KinematicsError : public SolverError {
public:
    using SolverError::SolverError;
};

/// Failure while fitting a corrector network.
class TrainingError : public Error {
public:
    explicit TrainingError(const std::string& msg, long epoch = -1)
        : Error(msg), epoch_(epoch) {}

    long epoch() const { return epoch_; }

private:
    long epoch_;
};

/// Exit codes used by the CLI, one per error category.
enum class ExitCode : int {
    Ok = 0,
    Unknown = 1,
    Config = 2,
    Data = 3,
    Solver = 4,
    Training = 5,
};

} // namespace ncorr
