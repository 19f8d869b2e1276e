#pragma once

#include <stdexcept>
#include <string>

namespace dyonlab {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid run configuration (parameter ranges, grid construction).
struct ConfigError : Error {
    using Error::Error;
};

// Non-finite or out-of-range values fed to a numerical kernel.
struct DomainError : Error {
    using Error::Error;
};

// Picard iteration at the origin failed to contract.
struct SeriesError : Error {
    using Error::Error;
};

// Adaptive step size underflowed; the problem looks stiff or singular.
struct StiffnessError : Error {
    using Error::Error;
};

// Shooting solver could not bracket or maintain a classification.
struct ShootingError : Error {
    using Error::Error;
};

// Outer fixed-point iteration exceeded its sweep budget.
struct ConvergenceError : Error {
    using Error::Error;
};

}  // namespace dyonlab
