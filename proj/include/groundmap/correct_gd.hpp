#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "groundmap/correct_regression.hpp"
#include "groundmap/geometry.hpp"
#include "groundmap/simulator.hpp"

namespace groundmap {

/// The 8 optimization variables: (u, v) of the four image-side trapezoid
/// vertices, in the geometry vertex order.
using VertexVector = std::array<double, 8>;

VertexVector flatten(const PixelQuad& q);
PixelQuad unflatten(const VertexVector& v);

struct GdConfig {
    double delta_max = 10.0;                           // box half-width (px)
    std::vector<double> coarse_grid = {-4, -2, 0, 2, 4}; // per-axis displacements (px)
    std::vector<double> fine_steps = {2.0, 1.0, 0.5, 0.25};
    long budget = 20000;  // max fine-phase objective evaluations
    int patience = 2;     // improvement-free passes before the step shrinks
    std::array<int, 2> coarse_vertices = {0, 2}; // diagonal pair: top-left, bottom-right
    std::uint64_t seed = 0;

    bool valid() const;
};

/// Everything the objective needs besides the vertex vector. `initial`
/// anchors the delta_max feasibility box.
struct GdContext {
    GroundQuad dst;
    std::vector<CalibrationSample> samples;
    CameraOrigin origin;
    double scale = 1.0;
    VertexVector initial{};
};

/// Mean absolute calibration error under the homography induced by v.
/// Returns +infinity for infeasible candidates (outside the delta_max box,
/// degenerate quad, or a sample at the horizon).
double objective(const VertexVector& v, const GdContext& ctx, const GdConfig& cfg);

struct TraceEntry {
    long evaluation = 0; // candidate-evaluation count when the move was accepted
    int coordinate = -1; // 0..7, or -1 for a coarse-phase joint move
    double delta = 0.0;
    double objective = 0.0;
};

struct GdResult {
    VertexVector vertices{};
    std::vector<TraceEntry> trace;
    long evaluations = 0; // candidate evaluations (baseline excluded)
    double initial_objective = 0.0;
    double final_objective = 0.0;
};

/// Phase 1: joint 2-D grid over the displacement of each of the two
/// opposing corners, handled sequentially. Never returns a worse point.
VertexVector coarse_search(const VertexVector& v0, const GdContext& ctx, const GdConfig& cfg,
                           double& best_obj, long& evaluations,
                           std::vector<TraceEntry>& trace);

/// Phase 2: randomized-order coordinate descent with a shrinking step
/// schedule; only strictly improving moves are accepted.
VertexVector fine_descent(const VertexVector& v, const GdContext& ctx, const GdConfig& cfg,
                          double& best_obj, long& evaluations,
                          std::vector<TraceEntry>& trace);

/// Both phases. objective(result) <= objective(v0) always; with budget 0
/// the start point is returned untouched.
GdResult optimize(const VertexVector& v0, const GdContext& ctx, const GdConfig& cfg);

} // namespace groundmap
