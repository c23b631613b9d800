#pragma once

// Test-only oracles, kept independent of the library's solve paths.

#include <array>
#include <cmath>
#include <utility>

namespace groundmap::testing {

/// Least-squares fit of e = a d^2 + b d via thin QR (Gram-Schmidt) on the
/// 3x2 design matrix; deliberately avoids the normal equations.
inline std::pair<double, double>
qr_least_squares(const std::array<std::pair<double, double>, 3>& pairs) {
    double c1[3], c2[3], e[3];
    for (int i = 0; i < 3; ++i) {
        const auto& [d, err] = pairs[static_cast<std::size_t>(i)];
        c1[i] = d * d;
        c2[i] = d;
        e[i] = err;
    }
    const double n1 = std::sqrt(c1[0] * c1[0] + c1[1] * c1[1] + c1[2] * c1[2]);
    const double q1[3] = {c1[0] / n1, c1[1] / n1, c1[2] / n1};
    const double r12 = q1[0] * c2[0] + q1[1] * c2[1] + q1[2] * c2[2];
    const double w[3] = {c2[0] - r12 * q1[0], c2[1] - r12 * q1[1], c2[2] - r12 * q1[2]};
    const double n2 = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    const double q2[3] = {w[0] / n2, w[1] / n2, w[2] / n2};
    const double qe1 = q1[0] * e[0] + q1[1] * e[1] + q1[2] * e[2];
    const double qe2 = q2[0] * e[0] + q2[1] * e[1] + q2[2] * e[2];
    const double b = qe2 / n2;
    const double a = (qe1 - r12 * b) / n1;
    return {a, b};
}

} // namespace groundmap::testing
