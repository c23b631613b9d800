#pragma once

#include <optional>

#include "groundmap/geometry.hpp"

namespace groundmap {

/// Per-column decomposition of the forward-distance mapping
///
///   Y(v) = (num_slope * v + num_const) / (den_slope * v + den_const)
///        = offset + scale / (v - horizon)        (when den_slope != 0)
///
/// For columns where the denominator row is constant the mapping is affine
/// and horizon/offset/scale are absent.
struct ColumnDepthModel {
    double u = 0.0;
    double num_slope = 0.0; // h22
    double num_const = 0.0; // h21*u + h23
    double den_slope = 0.0; // h32
    double den_const = 0.0; // h31*u + h33

    std::optional<double> horizon; // row where the denominator vanishes (px)
    std::optional<double> offset;  // far-field constant (m)
    std::optional<double> scale;   // hyperbola scale K (m*px)

    bool affine() const { return !horizon.has_value(); }

    /// Forward distance at row v via the rational form. Throws AtHorizon.
    double depth_at(double v) const;
};

ColumnDepthModel column_model(const Homography& H, double u);

/// Distance error caused by shifting the effective horizon by eps pixels:
/// scale * (1/((v - horizon) - eps) - 1/(v - horizon)).
/// Throws AffineColumn for affine columns, AtHorizon near either pole.
double exact_error(const ColumnDepthModel& model, double v, double eps);

/// First-order error law (eps / scale) * distance^2.
/// Throws AffineColumn when the model has no scale factor.
double approx_error(const ColumnDepthModel& model, double distance, double eps);

/// Row where column u maps to infinite distance, or nullopt for affine columns.
std::optional<double> horizon_row(const Homography& H, double u);

/// Horizon shift of a perturbed homography relative to the reference, at
/// column u. Diagnostic; throws AffineColumn if either horizon is absent.
double measure_epsilon(const Homography& reference, const Homography& perturbed, double u);

} // namespace groundmap
