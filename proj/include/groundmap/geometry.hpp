#pragma once

#include <array>
#include <cstddef>

#include "groundmap/error.hpp"

namespace groundmap {

/// Image point in pixel coordinates; v grows downward. Sub-pixel values allowed.
struct PixelPoint {
    double u = 0.0;
    double v = 0.0;
};

/// Ground-plane point in meters: x lateral (right positive), y forward.
struct GroundPoint {
    double x = 0.0;
    double y = 0.0;
};

inline double coord(const PixelPoint& p, int axis) { return axis == 0 ? p.u : p.v; }
inline double coord(const GroundPoint& p, int axis) { return axis == 0 ? p.x : p.y; }
inline void set_coord(PixelPoint& p, int axis, double value) { (axis == 0 ? p.u : p.v) = value; }
inline void set_coord(GroundPoint& p, int axis, double value) { (axis == 0 ? p.x : p.y) = value; }

/// Ordered quadrilateral. Vertex order convention: top-left, top-right,
/// bottom-right, bottom-left in image coordinates (index 0..3).
template <typename Point>
struct Quad {
    std::array<Point, 4> vertices{};

    const Point& operator[](std::size_t i) const { return vertices[i]; }
    Point& operator[](std::size_t i) { return vertices[i]; }
};

using PixelQuad = Quad<PixelPoint>;
using GroundQuad = Quad<GroundPoint>;

/// Collinearity tolerance on scale-normalized coordinates.
inline constexpr double kCollinearityTol = 1e-9;

/// Pivot / denominator / determinant guard.
inline constexpr double kSingularTol = 1e-12;

/// True when all vertices are finite and no three are collinear
/// (signed-area test after normalizing by the quad's extent).
bool quad_valid(const PixelQuad& q);
bool quad_valid(const GroundQuad& q);

/// Plane-to-plane projective map, pixel side to ground side.
/// Canonical gauge: Frobenius norm 1, sign fixed so h33 >= 0 (first
/// nonzero entry positive if h33 vanishes).
struct Homography {
    std::array<double, 9> h{1, 0, 0, 0, 1, 0, 0, 0, 1}; // row-major

    double at(int row, int col) const { return h[static_cast<std::size_t>(row * 3 + col)]; }

    /// Normalizes raw coefficients into the canonical gauge.
    /// Throws SingularSystem when the matrix is not invertible.
    static Homography from_raw(const std::array<double, 9>& raw);

    double det() const;
};

/// Exact 4-point homography from corresponding quads (vertex i of src maps
/// to vertex i of dst). Throws DegenerateQuad or SingularSystem.
Homography compute_homography(const PixelQuad& src, const GroundQuad& dst);

/// Applies the projective map. Throws AtHorizon when the denominator
/// h31*u + h32*v + h33 falls below the singularity guard.
GroundPoint map_point(const Homography& H, const PixelPoint& p);

/// Same projective formula applied ground-to-pixel (use with invert(H)).
PixelPoint map_point(const Homography& H, const GroundPoint& g);

/// Inverse map, normalized to the same gauge.
Homography invert(const Homography& H);

} // namespace groundmap
