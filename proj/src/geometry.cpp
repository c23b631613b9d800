#include "groundmap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace groundmap {

namespace {

template <typename Point>
bool quad_valid_impl(const Quad<Point>& q) {
    double extent = 0.0;
    for (const auto& p : q.vertices) {
        const double a = coord(p, 0);
        const double b = coord(p, 1);
        if (!std::isfinite(a) || !std::isfinite(b))
            return false;
        extent = std::max({extent, std::abs(a), std::abs(b)});
    }
    const double scale = extent > 0.0 ? extent : 1.0;
    // Every triple of vertices must span a triangle.
    for (int skip = 0; skip < 4; ++skip) {
        Point t[3];
        int n = 0;
        for (int i = 0; i < 4; ++i)
            if (i != skip)
                t[n++] = q[static_cast<std::size_t>(i)];
        const double ax = (coord(t[1], 0) - coord(t[0], 0)) / scale;
        const double ay = (coord(t[1], 1) - coord(t[0], 1)) / scale;
        const double bx = (coord(t[2], 0) - coord(t[0], 0)) / scale;
        const double by = (coord(t[2], 1) - coord(t[0], 1)) / scale;
        if (std::abs(ax * by - ay * bx) <= kCollinearityTol)
            return false;
    }
    return true;
}

// Gaussian elimination with partial pivoting on an n x n system.
// Returns false when a pivot falls below the guard.
template <int N>
bool solve_linear(std::array<std::array<double, N>, N>& a, std::array<double, N>& b,
                  std::array<double, N>& x) {
    for (int col = 0; col < N; ++col) {
        int pivot = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col]))
                pivot = r;
        if (std::abs(a[pivot][col]) < kSingularTol)
            return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < N; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0)
                continue;
            for (int c = col; c < N; ++c)
                a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (int row = N - 1; row >= 0; --row) {
        double s = b[row];
        for (int c = row + 1; c < N; ++c)
            s -= a[row][c] * x[c];
        x[row] = s / a[row][row];
    }
    return true;
}

// Similarity that centers the points and scales mean radius to sqrt(2).
struct Similarity {
    double scale = 1.0;
    double tx = 0.0;
    double ty = 0.0;
};

template <typename Point>
Similarity conditioning_transform(const Quad<Point>& q) {
    double cx = 0.0, cy = 0.0;
    for (const auto& p : q.vertices) {
        cx += coord(p, 0);
        cy += coord(p, 1);
    }
    cx /= 4.0;
    cy /= 4.0;
    double mean_r = 0.0;
    for (const auto& p : q.vertices)
        mean_r += std::hypot(coord(p, 0) - cx, coord(p, 1) - cy);
    mean_r /= 4.0;
    Similarity s;
    s.scale = mean_r > 0.0 ? std::sqrt(2.0) / mean_r : 1.0;
    s.tx = -cx * s.scale;
    s.ty = -cy * s.scale;
    return s;
}

} // namespace

bool quad_valid(const PixelQuad& q) { return quad_valid_impl(q); }
bool quad_valid(const GroundQuad& q) { return quad_valid_impl(q); }

Homography Homography::from_raw(const std::array<double, 9>& raw) {
    double norm = 0.0;
    for (double v : raw)
        norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw SingularSystem("homography coefficients are not finite");
    Homography H;
    for (std::size_t i = 0; i < 9; ++i)
        H.h[i] = raw[i] / norm;
    double sign = 0.0;
    if (std::abs(H.h[8]) >= kSingularTol) {
        sign = H.h[8] > 0.0 ? 1.0 : -1.0;
    } else {
        for (double v : H.h) {
            if (std::abs(v) >= kSingularTol) {
                sign = v > 0.0 ? 1.0 : -1.0;
                break;
            }
        }
    }
    if (sign < 0.0)
        for (double& v : H.h)
            v = -v;
    if (std::abs(H.det()) <= kSingularTol)
        throw SingularSystem("homography is singular after normalization");
    return H;
}

double Homography::det() const {
    return h[0] * (h[4] * h[8] - h[5] * h[7]) - h[1] * (h[3] * h[8] - h[5] * h[6]) +
           h[2] * (h[3] * h[7] - h[4] * h[6]);
}

Homography compute_homography(const PixelQuad& src, const GroundQuad& dst) {
    if (!quad_valid(src))
        throw DegenerateQuad("source quad has collinear or non-finite vertices");
    if (!quad_valid(dst))
        throw DegenerateQuad("destination quad has collinear or non-finite vertices");

    // Condition both sides before the 8x8 solve; denormalize afterwards.
    const Similarity ts = conditioning_transform(src);
    const Similarity td = conditioning_transform(dst);

    std::array<std::array<double, 8>, 8> a{};
    std::array<double, 8> b{};
    for (int i = 0; i < 4; ++i) {
        const double u = src[static_cast<std::size_t>(i)].u * ts.scale + ts.tx;
        const double v = src[static_cast<std::size_t>(i)].v * ts.scale + ts.ty;
        const double x = dst[static_cast<std::size_t>(i)].x * td.scale + td.tx;
        const double y = dst[static_cast<std::size_t>(i)].y * td.scale + td.ty;
        a[static_cast<std::size_t>(2 * i)] = {u, v, 1, 0, 0, 0, -u * x, -v * x};
        b[static_cast<std::size_t>(2 * i)] = x;
        a[static_cast<std::size_t>(2 * i + 1)] = {0, 0, 0, u, v, 1, -u * y, -v * y};
        b[static_cast<std::size_t>(2 * i + 1)] = y;
    }
    std::array<double, 8> x{};
    if (!solve_linear<8>(a, b, x))
        throw SingularSystem("4-point correspondence system is rank deficient");

    // Conditioned homography with h33 = 1.
    const std::array<double, 9> hn = {x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7], 1.0};

    // H = Td^-1 * Hn * Ts, with Ts/Td the similarity transforms above.
    // Td^-1 maps (x', y') -> ((x' - tx)/s, (y' - ty)/s).
    std::array<double, 9> m{};
    // First Hn * Ts.
    const std::array<double, 9> tsm = {ts.scale, 0, ts.tx, 0, ts.scale, ts.ty, 0, 0, 1};
    std::array<double, 9> hts{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k)
                s += hn[static_cast<std::size_t>(r * 3 + k)] * tsm[static_cast<std::size_t>(k * 3 + c)];
            hts[static_cast<std::size_t>(r * 3 + c)] = s;
        }
    const std::array<double, 9> tdinv = {1.0 / td.scale, 0, -td.tx / td.scale,
                                         0, 1.0 / td.scale, -td.ty / td.scale,
                                         0, 0, 1};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k)
                s += tdinv[static_cast<std::size_t>(r * 3 + k)] * hts[static_cast<std::size_t>(k * 3 + c)];
            m[static_cast<std::size_t>(r * 3 + c)] = s;
        }
    return Homography::from_raw(m);
}

GroundPoint map_point(const Homography& H, const PixelPoint& p) {
    const double w = H.h[6] * p.u + H.h[7] * p.v + H.h[8];
    if (std::abs(w) <= kSingularTol)
        throw AtHorizon("pixel lies on the projective horizon");
    return {(H.h[0] * p.u + H.h[1] * p.v + H.h[2]) / w,
            (H.h[3] * p.u + H.h[4] * p.v + H.h[5]) / w};
}

PixelPoint map_point(const Homography& H, const GroundPoint& g) {
    const double w = H.h[6] * g.x + H.h[7] * g.y + H.h[8];
    if (std::abs(w) <= kSingularTol)
        throw AtHorizon("ground point lies on the projective horizon");
    return {(H.h[0] * g.x + H.h[1] * g.y + H.h[2]) / w,
            (H.h[3] * g.x + H.h[4] * g.y + H.h[5]) / w};
}

Homography invert(const Homography& H) {
    const auto& h = H.h;
    const double d = H.det();
    if (std::abs(d) <= kSingularTol)
        throw SingularSystem("homography is singular");
    // Adjugate; overall scale is absorbed by the gauge normalization.
    const std::array<double, 9> adj = {
        h[4] * h[8] - h[5] * h[7], h[2] * h[7] - h[1] * h[8], h[1] * h[5] - h[2] * h[4],
        h[5] * h[6] - h[3] * h[8], h[0] * h[8] - h[2] * h[6], h[2] * h[3] - h[0] * h[5],
        h[3] * h[7] - h[4] * h[6], h[1] * h[6] - h[0] * h[7], h[0] * h[4] - h[1] * h[3]};
    return Homography::from_raw(adj);
}

} // namespace groundmap
