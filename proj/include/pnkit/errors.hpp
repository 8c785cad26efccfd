#pragma once

#include <stdexcept>

namespace pnkit {

/// Base class of every toolkit error.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid run configuration (dimensions, tolerances, CLI arguments).
struct ConfigError : Error { using Error::Error; };

// Geometry guards.
struct NumericalDegeneracy : Error { using Error::Error; };
struct RankDeficiency : Error { using Error::Error; };
struct NotTangent : Error { using Error::Error; };
struct FrameSolveFailure : Error { using Error::Error; };
struct DegenerateForm : Error { using Error::Error; };

// Tensor-calculus guards.
struct KindMismatch : Error { using Error::Error; };
struct AsymmetryResidual : Error { using Error::Error; };
struct SingularNt : Error { using Error::Error; };
struct OddMultiplicity : Error { using Error::Error; };
struct ComplexSpectrum : Error { using Error::Error; };

// Model and spectrum guards.
struct CountMismatch : Error { using Error::Error; };
struct CalibrationFailure : Error { using Error::Error; };

// Groupoid guards.
struct NotComposable : Error { using Error::Error; };
struct TargetOutsidePolytope : Error { using Error::Error; };
struct SingularLog : Error { using Error::Error; };

}  // namespace pnkit
