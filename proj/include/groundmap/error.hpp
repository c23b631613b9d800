#pragma once

#include <stdexcept>
#include <string>

namespace groundmap {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Three vertices of a quad are (nearly) collinear.
struct DegenerateQuad : Error {
    using Error::Error;
};

/// A linear system is rank-deficient beyond the pivot tolerance.
struct SingularSystem : Error {
    using Error::Error;
};

/// A projective denominator vanished; the point maps to infinity.
struct AtHorizon : Error {
    using Error::Error;
};

/// Pixel lies on or above the horizon row; no ground intersection exists.
struct AboveHorizon : Error {
    using Error::Error;
};

/// Column model has no finite horizon (denominator row is constant).
struct AffineColumn : Error {
    using Error::Error;
};

struct OutOfFrustum : Error {
    using Error::Error;
};

struct OutOfRange : Error {
    using Error::Error;
};

/// Perturbation sampling kept producing degenerate quads.
struct DegenerateAfterRetries : Error {
    using Error::Error;
};

/// Radial correction is undefined at the camera origin itself.
struct AtOrigin : Error {
    using Error::Error;
};

struct InsufficientData : Error {
    using Error::Error;
};

} // namespace groundmap
