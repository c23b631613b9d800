#pragma once

#include <array>
#include <utility>
#include <vector>

#include "groundmap/geometry.hpp"
#include "groundmap/simulator.hpp"

namespace groundmap {

/// Projection of the camera's optical center onto the ground plane.
struct CameraOrigin {
    GroundPoint point{0.0, 0.0};
};

enum class FitMode { quadratic, linear_fallback };

/// Fitted magnitude model e(d) = quadratic*d^2 + linear*d, both clamped
/// non-negative, plus the radial direction the correction is applied in:
/// +1 pulls mapped points toward the camera (overshoot), -1 pushes away.
struct ErrorModel {
    double quadratic = 0.0; // 1/m
    double linear = 0.0;    // dimensionless
    FitMode mode = FitMode::quadratic;
    int direction = +1;
};

/// Per-calibration-point measurement: mapped position, its range from the
/// camera origin and the Euclidean error against ground truth.
struct CalibError {
    double distance = 0.0; // d_i = |p_i - o|
    double error = 0.0;    // e_i = |p_i - g_i|
    GroundPoint mapped;
    GroundPoint truth;
};

/// Maps each calibration pixel through H (scaled from map units to meters)
/// and measures range and error. Propagates AtHorizon.
std::vector<CalibError> calib_errors(const Homography& H, double scale,
                                     const std::vector<CalibrationSample>& samples,
                                     const CameraOrigin& origin);

/// Closed-form least-squares fit of (quadratic, linear) from three (d, e)
/// pairs via the normal equations, with non-negativity clamping and a
/// linear-only fallback when the system is degenerate (relative
/// determinant below 1e-9). Direction is left at the default +1.
ErrorModel fit_error_model(const std::array<std::pair<double, double>, 3>& pairs);

/// Full fit from measured calibration errors; additionally resolves the
/// correction direction by majority vote on whether the mapped points
/// overshoot their ground truth ranges.
ErrorModel fit_error_model(const std::vector<CalibError>& observations,
                           const CameraOrigin& origin);

/// Displaces p along the ray through the camera origin by the modeled
/// error at its range; the angular position about the origin is preserved.
/// Throws AtOrigin when p coincides with the origin.
GroundPoint apply_correction(const GroundPoint& p, const ErrorModel& model,
                             const CameraOrigin& origin);

} // namespace groundmap
