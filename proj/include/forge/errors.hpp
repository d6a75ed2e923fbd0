#pragma once

#include <stdexcept>
#include <string>

namespace forge {

/// Base class for all failures this library raises on purpose.
struct ForgeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad user input (config values, degenerate boxes, invalid parameters).
struct InvalidInputError : ForgeError {
    using ForgeError::ForgeError;
};

/// Requested frequency is too close to (or inside) the certified spectrum.
struct ResonanceError : ForgeError {
    using ForgeError::ForgeError;
};

/// Spectral window does not cover the query; result would be inconclusive.
struct SpectralWindowError : ForgeError {
    using ForgeError::ForgeError;
};

/// Linear or eigen solver failed to reach its tolerance.
struct SolverError : ForgeError {
    using ForgeError::ForgeError;
};

/// Construction-stage failure (positivity, admissibility, compatibility).
struct ConstructionError : ForgeError {
    using ForgeError::ForgeError;
};

/// Flow map failed its Jacobian-determinant certification.
struct FlowError : ForgeError {
    using ForgeError::ForgeError;
};

} // namespace forge
