// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace dpdlab {

// Root of every exception thrown by dpdlab. Callers that only need to know
// "something in the experiment failed" catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration value or combination (maps to CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Metric is undefined for the input (zero power, empty group).
class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

// Mismatched lengths between waveforms that must be paired.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Input too short for the requested operation.
class LengthError : public Error {
public:
    using Error::Error;
};

// Cross-correlation has two peaks too close to call.
class AmbiguityError : public Error {
public:
    using Error::Error;
};

// OFDM demodulation does not line up with symbol boundaries.
class AlignmentError : public Error {
public:
    using Error::Error;
};

// Plant returned a waveform the ILC loop cannot use.
class PlantError : public Error {
public:
    using Error::Error;
};

// Least-squares problem is rank deficient.
class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, double condition)
        : Error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace dpdlab
