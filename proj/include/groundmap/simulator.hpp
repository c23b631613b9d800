#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "groundmap/geometry.hpp"

namespace groundmap {

/// Ideal pinhole camera on a planar scene: square pixels, zero roll/yaw,
/// mounted at height_m above the ground and pitched tilt_deg downward.
struct CameraModel {
    double fov_h_deg = 95.0;
    int width = 1920;
    int height = 1080;
    double height_m = 4.0;
    double tilt_deg = 15.0;

    double focal() const;
    double cx() const { return width / 2.0; }
    double cy() const { return height / 2.0; }

    /// Image row of the horizon: cy - focal * tan(tilt).
    double horizon_row() const;

    bool valid() const;
};

enum class ProjectionStatus { ok, behind_camera, out_of_frustum };

/// Projection result; the pixel is reported even when the point falls
/// outside the image or behind the camera so callers can diagnose.
struct Projection {
    PixelPoint pixel;
    ProjectionStatus status = ProjectionStatus::ok;
};

Projection project(const CameraModel& cam, const GroundPoint& g);

/// Exact ray/ground-plane intersection; the oracle every homography result
/// is checked against. Throws AboveHorizon for rows at or above the horizon.
GroundPoint unproject_to_ground(const CameraModel& cam, const PixelPoint& p);

struct TrapezoidPair {
    PixelQuad image;
    GroundQuad ground;
};

/// Road-surface trapezoid: ground side is the axis-aligned rectangle
/// {(+-half_width, far_y), (+-half_width, near_y)}, image side its exact
/// projection, ordered top-left, top-right, bottom-right, bottom-left.
TrapezoidPair true_trapezoid(const CameraModel& cam, double near_y, double far_y,
                             double half_width);

/// Far edge defaults to 200 m so the reference quad spans the whole visible
/// road; vertex errors then grow smoothly with range across the 5-44 m band.
struct TrapezoidSpec {
    double near_y = 5.0;
    double far_y = 200.0;
    double half_width = 3.5;
};

struct SceneSpec {
    std::string id = "scene1";
    CameraModel camera;
    double calib_min = 5.0;
    double calib_max = 44.0;
    TrapezoidSpec trapezoid;
    int n_trajectories = 20;
    int points_per_trajectory = 50;
    /// Mode of the triangular forward-distance distribution, as a fraction
    /// of the calibration range.
    double distance_mode_fraction = 1.0 / 3.0;
    /// Lateral half-extent of trajectory traffic around the road axis (m);
    /// clamped to the frustum at every depth. Default models a pedestrian
    /// corridor along the camera axis.
    double lateral_half_width = 0.5;
    /// Optional Gaussian pixel noise on detected ground-contact points.
    /// Zero in every acceptance run.
    double detection_noise_px = 0.0;
};

struct Scene {
    std::string id;
    CameraModel camera;
    double calib_min = 0.0;
    double calib_max = 0.0;
    TrapezoidPair trapezoid;
    std::vector<std::vector<GroundPoint>> trajectories;
};

/// Deterministic function of (spec, seed).
Scene generate_scene(const SceneSpec& spec, std::uint64_t seed);

struct CalibrationSample {
    PixelPoint pixel;
    GroundPoint truth;
    int id = 0;
};

/// Reference objects placed directly in front of the camera at the given
/// forward distances, with exactly projected pixels. Throws OutOfRange for
/// distances outside [calib_min, calib_max].
std::vector<CalibrationSample> calibration_points(const Scene& scene,
                                                  const std::vector<double>& distances);

/// Same, with optional Gaussian pixel noise on the detected points.
std::vector<CalibrationSample> calibration_points(const Scene& scene,
                                                  const std::vector<double>& distances,
                                                  double noise_px, std::uint64_t seed);

} // namespace groundmap
