#include "groundmap/depth_model.hpp"

#include <cmath>

namespace groundmap {

double ColumnDepthModel::depth_at(double v) const {
    const double den = den_slope * v + den_const;
    if (std::abs(den) <= kSingularTol)
        throw AtHorizon("row lies on the column horizon");
    return (num_slope * v + num_const) / den;
}

ColumnDepthModel column_model(const Homography& H, double u) {
    ColumnDepthModel m;
    m.u = u;
    m.num_slope = H.at(1, 1);
    m.num_const = H.at(1, 0) * u + H.at(1, 2);
    m.den_slope = H.at(2, 1);
    m.den_const = H.at(2, 0) * u + H.at(2, 2);
    if (std::abs(m.den_slope) > kSingularTol) {
        const double vh = -m.den_const / m.den_slope;
        m.horizon = vh;
        m.offset = m.num_slope / m.den_slope;
        m.scale = (m.num_slope * vh + m.num_const) / m.den_slope;
    }
    return m;
}

double exact_error(const ColumnDepthModel& model, double v, double eps) {
    if (model.affine())
        throw AffineColumn("column has no finite horizon");
    const double q = v - *model.horizon;
    if (std::abs(q) < kSingularTol || std::abs(q - eps) < kSingularTol)
        throw AtHorizon("row too close to the (shifted) horizon");
    return *model.scale * (1.0 / (q - eps) - 1.0 / q);
}

double approx_error(const ColumnDepthModel& model, double distance, double eps) {
    if (model.affine() || !model.scale.has_value())
        throw AffineColumn("column has no scale factor");
    if (std::abs(*model.scale) < kSingularTol)
        throw AffineColumn("scale factor vanishes");
    return (eps / *model.scale) * distance * distance;
}

std::optional<double> horizon_row(const Homography& H, double u) {
    const double c = H.at(2, 1);
    if (std::abs(c) <= kSingularTol)
        return std::nullopt;
    return -(H.at(2, 0) * u + H.at(2, 2)) / c;
}

double measure_epsilon(const Homography& reference, const Homography& perturbed, double u) {
    const auto vh_ref = horizon_row(reference, u);
    const auto vh_pert = horizon_row(perturbed, u);
    if (!vh_ref || !vh_pert)
        throw AffineColumn("horizon undefined for one of the homographies");
    return *vh_pert - *vh_ref;
}

} // namespace groundmap
