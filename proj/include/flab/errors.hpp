#pragma once

#include <stdexcept>
#include <string>

namespace flab {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user-supplied parameters or malformed configuration.
struct ConfigError : Error {
    using Error::Error;
};

// Curvature cap incompatible with the radius (cap at or below 1/R^2).
struct InfeasiblePinchError : ConfigError {
    using ConfigError::ConfigError;
};

// Evaluation outside the admissible domain of an object.
struct RangeError : Error {
    using Error::Error;
};

// A documented precondition of an operation was violated by the input.
struct ContractError : Error {
    using Error::Error;
};

// Numerical machinery failed: integration blow-up, singular linear solve,
// loss of an invariant beyond tolerance, failed internal consistency check.
struct NumericsError : Error {
    using Error::Error;
};

// Loss of convexity (fundamental tensor not positive definite).
struct ConvexityError : NumericsError {
    using NumericsError::NumericsError;
};

// Curves too close together (or to a chart pole) for a stable computation.
struct ProximityError : Error {
    using Error::Error;
};

// A quantity that must be an integer came out too far from one.
struct QuadratureError : NumericsError {
    using NumericsError::NumericsError;
};

// Push-off framing produced an unstable or inconsistent answer.
struct FramingError : Error {
    using Error::Error;
};

// A first return to the equator was not found before truncation.
struct ReturnNotFoundError : Error {
    using Error::Error;
};

// A parameter sweep failed to bracket the target value of a root find.
struct BracketError : Error {
    using Error::Error;
};

}  // namespace flab
