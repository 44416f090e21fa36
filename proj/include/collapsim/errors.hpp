#pragma once

#include <stdexcept>
#include <string>

namespace collapsim {

// Numerical/domain failures raised by the simulation modules. The CLI maps
// anything derived from NumericalError to exit code 4.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroNorm : NumericalError {
    using NumericalError::NumericalError;
};

struct NonIntegralState : NumericalError {
    using NumericalError::NumericalError;
};

struct UnstableStep : NumericalError {
    using NumericalError::NumericalError;
};

struct StepTooLarge : NumericalError {
    using NumericalError::NumericalError;
};

struct GridTooCoarse : NumericalError {
    using NumericalError::NumericalError;
};

struct DegenerateWeights : NumericalError {
    using NumericalError::NumericalError;
};

struct BadSector : NumericalError {
    using NumericalError::NumericalError;
};

// CLI-level failures.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace collapsim
