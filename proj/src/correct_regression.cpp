#include "groundmap/correct_regression.hpp"

#include <cmath>

namespace groundmap {

std::vector<CalibError> calib_errors(const Homography& H, double scale,
                                     const std::vector<CalibrationSample>& samples,
                                     const CameraOrigin& origin) {
    std::vector<CalibError> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        const GroundPoint raw = map_point(H, s.pixel);
        CalibError ce;
        ce.mapped = {raw.x * scale, raw.y * scale};
        ce.truth = s.truth;
        ce.distance = std::hypot(ce.mapped.x - origin.point.x, ce.mapped.y - origin.point.y);
        ce.error = std::hypot(ce.mapped.x - s.truth.x, ce.mapped.y - s.truth.y);
        out.push_back(ce);
    }
    return out;
}

ErrorModel fit_error_model(const std::array<std::pair<double, double>, 3>& pairs) {
    double s2 = 0.0, s3 = 0.0, s4 = 0.0, t1 = 0.0, t2 = 0.0;
    for (const auto& [d, e] : pairs) {
        const double d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
        t1 += d * e;
        t2 += d2 * e;
    }
    ErrorModel m;
    const double det = s4 * s2 - s3 * s3;
    if (std::abs(det) < 1e-9 * s4 * s2 || s2 <= 0.0) {
        m.mode = FitMode::linear_fallback;
        m.quadratic = 0.0;
        m.linear = s2 > 0.0 ? std::max(0.0, t1 / s2) : 0.0;
        return m;
    }
    m.mode = FitMode::quadratic;
    m.quadratic = std::max(0.0, (t2 * s2 - t1 * s3) / det);
    m.linear = std::max(0.0, (s4 * t1 - s3 * t2) / det);
    return m;
}

ErrorModel fit_error_model(const std::vector<CalibError>& observations,
                           const CameraOrigin& origin) {
    if (observations.size() != 3)
        throw InsufficientData("regression fit expects exactly three calibration points");
    std::array<std::pair<double, double>, 3> pairs;
    int overshoot_votes = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& ob = observations[i];
        pairs[i] = {ob.distance, ob.error};
        const double truth_range =
            std::hypot(ob.truth.x - origin.point.x, ob.truth.y - origin.point.y);
        if (ob.distance > truth_range)
            ++overshoot_votes;
    }
    ErrorModel m = fit_error_model(pairs);
    m.direction = overshoot_votes >= 2 ? +1 : -1;
    return m;
}

GroundPoint apply_correction(const GroundPoint& p, const ErrorModel& model,
                             const CameraOrigin& origin) {
    const double dx = p.x - origin.point.x;
    const double dy = p.y - origin.point.y;
    const double d = std::hypot(dx, dy);
    if (d < 1e-9)
        throw AtOrigin("cannot correct a point at the camera origin");
    const double c = model.quadratic * d * d + model.linear * d;
    // direction = +1 moves toward the origin along the ray o -> p.
    const double step = static_cast<double>(model.direction) * c / d;
    return {p.x - dx * step, p.y - dy * step};
}

} // namespace groundmap
