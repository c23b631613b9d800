#include "groundmap/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "groundmap/rng.hpp"

namespace groundmap {

namespace {

constexpr double kDeg = 3.14159265358979323846 / 180.0;

struct CameraBasis {
    // World-frame camera axes: right, down (image v), forward (optical).
    double fwd_y, fwd_z;
    double down_y, down_z;
};

CameraBasis basis(const CameraModel& cam) {
    const double t = cam.tilt_deg * kDeg;
    // right = (1, 0, 0); tilt rotates forward/down about the right axis.
    return {std::cos(t), -std::sin(t), -std::sin(t), -std::cos(t)};
}

} // namespace

double CameraModel::focal() const {
    return (width / 2.0) / std::tan(0.5 * fov_h_deg * kDeg);
}

double CameraModel::horizon_row() const {
    return cy() - focal() * std::tan(tilt_deg * kDeg);
}

bool CameraModel::valid() const {
    return fov_h_deg > 0.0 && fov_h_deg < 180.0 && width > 0 && height > 0 &&
           height_m > 0.0 && tilt_deg >= 0.0 && tilt_deg < 90.0;
}

Projection project(const CameraModel& cam, const GroundPoint& g) {
    const CameraBasis cb = basis(cam);
    // Point relative to the optical center at (0, 0, height_m).
    const double px = g.x;
    const double py = g.y;
    const double pz = -cam.height_m;
    const double xc = px;
    const double yc = py * cb.down_y + pz * cb.down_z;
    const double zc = py * cb.fwd_y + pz * cb.fwd_z;
    Projection out;
    if (zc <= kSingularTol) {
        out.status = ProjectionStatus::behind_camera;
        out.pixel = {cam.cx(), cam.cy()};
        return out;
    }
    const double f = cam.focal();
    out.pixel = {cam.cx() + f * xc / zc, cam.cy() + f * yc / zc};
    if (out.pixel.u < 0.0 || out.pixel.u > cam.width || out.pixel.v < 0.0 ||
        out.pixel.v > cam.height)
        out.status = ProjectionStatus::out_of_frustum;
    return out;
}

GroundPoint unproject_to_ground(const CameraModel& cam, const PixelPoint& p) {
    const CameraBasis cb = basis(cam);
    const double f = cam.focal();
    const double xn = (p.u - cam.cx()) / f;
    const double yn = (p.v - cam.cy()) / f;
    // Ray direction in world coordinates.
    const double dx = xn;
    const double dy = yn * cb.down_y + cb.fwd_y;
    const double dz = yn * cb.down_z + cb.fwd_z;
    if (dz >= -kSingularTol)
        throw AboveHorizon("pixel ray does not intersect the ground plane");
    const double t = cam.height_m / (-dz);
    return {t * dx, t * dy};
}

TrapezoidPair true_trapezoid(const CameraModel& cam, double near_y, double far_y,
                             double half_width) {
    if (!(0.0 < near_y && near_y < far_y))
        throw OutOfFrustum("trapezoid requires 0 < near_y < far_y");
    TrapezoidPair t;
    t.ground[0] = {-half_width, far_y};
    t.ground[1] = {half_width, far_y};
    t.ground[2] = {half_width, near_y};
    t.ground[3] = {-half_width, near_y};
    for (std::size_t i = 0; i < 4; ++i) {
        const Projection pr = project(cam, t.ground[i]);
        if (pr.status != ProjectionStatus::ok)
            throw OutOfFrustum("trapezoid corner projects outside the image");
        t.image[i] = pr.pixel;
    }
    return t;
}

Scene generate_scene(const SceneSpec& spec, std::uint64_t seed) {
    if (!spec.camera.valid())
        throw OutOfRange("invalid camera parameters");
    if (!(0.0 < spec.calib_min && spec.calib_min < spec.calib_max))
        throw OutOfRange("invalid calibration range");

    Scene scene;
    scene.id = spec.id;
    scene.camera = spec.camera;
    scene.calib_min = spec.calib_min;
    scene.calib_max = spec.calib_max;
    scene.trapezoid = true_trapezoid(spec.camera, spec.trapezoid.near_y,
                                     spec.trapezoid.far_y, spec.trapezoid.half_width);

    const CameraModel& cam = spec.camera;
    const double t = cam.tilt_deg * kDeg;
    for (int traj = 0; traj < spec.n_trajectories; ++traj) {
        auto rng = make_engine(mix_seed(seed, 0x72616aULL, static_cast<std::uint64_t>(traj)));
        std::vector<GroundPoint> points;
        points.reserve(static_cast<std::size_t>(spec.points_per_trajectory));
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (int i = 0; i < spec.points_per_trajectory; ++i) {
            const double y = sample_triangular(rng, spec.calib_min, spec.calib_max,
                                               spec.distance_mode_fraction);
            // Traffic stays near the road axis; the frustum bound only
            // matters at depths where the road is wider than the image.
            const double zc = y * std::cos(t) + cam.height_m * std::sin(t);
            const double frustum = 0.95 * (cam.width / 2.0) * zc / cam.focal();
            const double x_max = std::min(spec.lateral_half_width, frustum);
            points.push_back({x_max * unit(rng), y});
        }
        scene.trajectories.push_back(std::move(points));
    }
    return scene;
}

std::vector<CalibrationSample> calibration_points(const Scene& scene,
                                                  const std::vector<double>& distances) {
    std::vector<CalibrationSample> samples;
    samples.reserve(distances.size());
    int id = 0;
    for (double d : distances) {
        if (d < scene.calib_min - 1e-9 || d > scene.calib_max + 1e-9)
            throw OutOfRange("calibration distance outside the scene range");
        CalibrationSample s;
        s.truth = {0.0, d};
        const Projection pr = project(scene.camera, s.truth);
        if (pr.status != ProjectionStatus::ok)
            throw OutOfFrustum("calibration point projects outside the image");
        s.pixel = pr.pixel;
        s.id = id++;
        samples.push_back(s);
    }
    return samples;
}

std::vector<CalibrationSample> calibration_points(const Scene& scene,
                                                  const std::vector<double>& distances,
                                                  double noise_px, std::uint64_t seed) {
    auto samples = calibration_points(scene, distances);
    if (noise_px > 0.0) {
        auto rng = make_engine(mix_seed(seed, 0x63616cULL));
        std::normal_distribution<double> noise(0.0, noise_px);
        for (auto& s : samples) {
            s.pixel.u += noise(rng);
            s.pixel.v += noise(rng);
        }
    }
    return samples;
}

} // namespace groundmap
