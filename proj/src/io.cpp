#include "groundmap/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace groundmap {

namespace {

template <typename Point>
json quad_to_json(const Quad<Point>& q) {
    json arr = json::array();
    for (const auto& p : q.vertices)
        arr.push_back({coord(p, 0), coord(p, 1)});
    return arr;
}

template <typename Point>
Quad<Point> quad_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4)
        throw OutOfRange("quad JSON must be an array of 4 [x, y] pairs");
    Quad<Point> q;
    for (std::size_t i = 0; i < 4; ++i) {
        set_coord(q[i], 0, j[i].at(0).get<double>());
        set_coord(q[i], 1, j[i].at(1).get<double>());
    }
    return q;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

json to_json(const PixelQuad& q) { return quad_to_json(q); }
json to_json(const GroundQuad& q) { return quad_to_json(q); }
PixelQuad pixel_quad_from_json(const json& j) { return quad_from_json<PixelPoint>(j); }
GroundQuad ground_quad_from_json(const json& j) { return quad_from_json<GroundPoint>(j); }

json to_json(const Homography& H) {
    json arr = json::array();
    for (double v : H.h)
        arr.push_back(v);
    return arr;
}

Homography homography_from_json(const json& j) {
    if (!j.is_array() || j.size() != 9)
        throw OutOfRange("homography JSON must be a row-major 9-element array");
    // Stored coefficients are already gauge-normalized; renormalizing here
    // would perturb the last bits and break byte-exact round trips.
    Homography H;
    for (std::size_t i = 0; i < 9; ++i) {
        H.h[i] = j[i].get<double>();
        if (!std::isfinite(H.h[i]))
            throw OutOfRange("homography coefficients must be finite");
    }
    return H;
}

json to_json(const CameraModel& cam) {
    return {{"fov_h_deg", cam.fov_h_deg}, {"width", cam.width},     {"height", cam.height},
            {"height_m", cam.height_m},   {"tilt_deg", cam.tilt_deg}};
}

CameraModel camera_from_json(const json& j) {
    CameraModel cam;
    cam.fov_h_deg = j.value("fov_h_deg", cam.fov_h_deg);
    cam.width = j.value("width", cam.width);
    cam.height = j.value("height", cam.height);
    cam.height_m = j.value("height_m", cam.height_m);
    cam.tilt_deg = j.value("tilt_deg", cam.tilt_deg);
    return cam;
}

json to_json(const SceneSpec& spec) {
    return {{"id", spec.id},
            {"camera", to_json(spec.camera)},
            {"calib_range", {spec.calib_min, spec.calib_max}},
            {"trapezoid",
             {{"near_y", spec.trapezoid.near_y},
              {"far_y", spec.trapezoid.far_y},
              {"half_width", spec.trapezoid.half_width}}},
            {"n_trajectories", spec.n_trajectories},
            {"points_per_trajectory", spec.points_per_trajectory},
            {"distance_mode_fraction", spec.distance_mode_fraction},
            {"lateral_half_width", spec.lateral_half_width},
            {"detection_noise_px", spec.detection_noise_px}};
}

SceneSpec scene_spec_from_json(const json& j) {
    SceneSpec spec;
    spec.id = j.value("id", spec.id);
    if (j.contains("camera"))
        spec.camera = camera_from_json(j["camera"]);
    if (j.contains("calib_range")) {
        spec.calib_min = j["calib_range"].at(0).get<double>();
        spec.calib_max = j["calib_range"].at(1).get<double>();
    }
    if (j.contains("trapezoid")) {
        const auto& t = j["trapezoid"];
        spec.trapezoid.near_y = t.value("near_y", spec.trapezoid.near_y);
        spec.trapezoid.far_y = t.value("far_y", spec.trapezoid.far_y);
        spec.trapezoid.half_width = t.value("half_width", spec.trapezoid.half_width);
    }
    spec.n_trajectories = j.value("n_trajectories", spec.n_trajectories);
    spec.points_per_trajectory = j.value("points_per_trajectory", spec.points_per_trajectory);
    spec.distance_mode_fraction = j.value("distance_mode_fraction", spec.distance_mode_fraction);
    spec.lateral_half_width = j.value("lateral_half_width", spec.lateral_half_width);
    spec.detection_noise_px = j.value("detection_noise_px", spec.detection_noise_px);
    return spec;
}

json to_json(const Scene& scene) {
    json trajectories = json::array();
    for (const auto& traj : scene.trajectories) {
        json t = json::array();
        for (const auto& p : traj)
            t.push_back({p.x, p.y});
        trajectories.push_back(std::move(t));
    }
    return {{"id", scene.id},
            {"camera", to_json(scene.camera)},
            {"calib_range", {scene.calib_min, scene.calib_max}},
            {"trapezoid",
             {{"image", to_json(scene.trapezoid.image)},
              {"ground", to_json(scene.trapezoid.ground)}}},
            {"trajectories", std::move(trajectories)}};
}

Scene scene_from_json(const json& j) {
    Scene scene;
    scene.id = j.at("id").get<std::string>();
    scene.camera = camera_from_json(j.at("camera"));
    scene.calib_min = j.at("calib_range").at(0).get<double>();
    scene.calib_max = j.at("calib_range").at(1).get<double>();
    scene.trapezoid.image = pixel_quad_from_json(j.at("trapezoid").at("image"));
    scene.trapezoid.ground = ground_quad_from_json(j.at("trapezoid").at("ground"));
    for (const auto& t : j.at("trajectories")) {
        std::vector<GroundPoint> traj;
        for (const auto& p : t)
            traj.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        scene.trajectories.push_back(std::move(traj));
    }
    return scene;
}

json to_json(const PerturbationSpec& spec) {
    return {{"magnitudes", spec.magnitudes},
            {"coord_count_range", {spec.min_coords, spec.max_coords}},
            {"sides", spec.sides == PerturbSides::both ? "both" : "image-only"},
            {"n_variants", spec.n_variants},
            {"map_m_per_px", spec.map_m_per_px}};
}

PerturbationSpec perturbation_spec_from_json(const json& j) {
    PerturbationSpec spec;
    if (j.contains("magnitudes"))
        spec.magnitudes = j["magnitudes"].get<std::vector<double>>();
    if (j.contains("coord_count_range")) {
        spec.min_coords = j["coord_count_range"].at(0).get<int>();
        spec.max_coords = j["coord_count_range"].at(1).get<int>();
    }
    if (j.contains("sides")) {
        const auto s = j["sides"].get<std::string>();
        if (s == "both")
            spec.sides = PerturbSides::both;
        else if (s == "image-only")
            spec.sides = PerturbSides::image_only;
        else
            throw OutOfRange("sides must be 'both' or 'image-only'");
    }
    spec.n_variants = j.value("n_variants", spec.n_variants);
    spec.map_m_per_px = j.value("map_m_per_px", spec.map_m_per_px);
    return spec;
}

json to_json(const TrapezoidVariant& v) {
    json applied = json::array();
    for (const auto& s : v.applied)
        applied.push_back({{"quad", s.quad},
                           {"vertex", s.vertex},
                           {"axis", s.axis},
                           {"shift_px", s.shift_px}});
    return {{"id", v.id},
            {"src", to_json(v.src)},
            {"dst", to_json(v.dst)},
            {"applied", std::move(applied)}};
}

TrapezoidVariant variant_from_json(const json& j) {
    TrapezoidVariant v;
    v.id = j.at("id").get<int>();
    v.src = pixel_quad_from_json(j.at("src"));
    v.dst = ground_quad_from_json(j.at("dst"));
    if (j.contains("applied"))
        for (const auto& s : j["applied"])
            v.applied.push_back({s.at("quad").get<int>(), s.at("vertex").get<int>(),
                                 s.at("axis").get<int>(), s.at("shift_px").get<double>()});
    return v;
}

json to_json(const ErrorModel& m) {
    return {{"a", m.quadratic},
            {"b", m.linear},
            {"mode", m.mode == FitMode::quadratic ? "quadratic" : "linear_fallback"},
            {"direction_sign", m.direction}};
}

ErrorModel error_model_from_json(const json& j) {
    ErrorModel m;
    m.quadratic = j.at("a").get<double>();
    m.linear = j.at("b").get<double>();
    m.mode = j.at("mode").get<std::string>() == "quadratic" ? FitMode::quadratic
                                                            : FitMode::linear_fallback;
    m.direction = j.value("direction_sign", 1);
    return m;
}

json to_json(const GdConfig& cfg) {
    return {{"delta_max", cfg.delta_max},
            {"coarse_grid", cfg.coarse_grid},
            {"fine_steps", cfg.fine_steps},
            {"budget", cfg.budget},
            {"patience", cfg.patience},
            {"coarse_vertices", cfg.coarse_vertices},
            {"seed", cfg.seed}};
}

GdConfig gd_config_from_json(const json& j) {
    GdConfig cfg;
    cfg.delta_max = j.value("delta_max", cfg.delta_max);
    if (j.contains("coarse_grid"))
        cfg.coarse_grid = j["coarse_grid"].get<std::vector<double>>();
    if (j.contains("fine_steps"))
        cfg.fine_steps = j["fine_steps"].get<std::vector<double>>();
    cfg.budget = j.value("budget", cfg.budget);
    cfg.patience = j.value("patience", cfg.patience);
    if (j.contains("coarse_vertices")) {
        cfg.coarse_vertices[0] = j["coarse_vertices"].at(0).get<int>();
        cfg.coarse_vertices[1] = j["coarse_vertices"].at(1).get<int>();
    }
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

json to_json(const AggregateStats& stats) {
    json out = json::object();
    for (const auto& [method, ms] : stats.per_method) {
        json m = {{"n_valid", ms.n_valid},
                  {"n_flagged", ms.n_flagged},
                  {"frac_positive_path", ms.frac_positive_path},
                  {"frac_positive_calib", ms.frac_positive_calib},
                  {"mean_path_improvement", ms.mean_path},
                  {"median_path_improvement", ms.median_path},
                  {"stddev_path_improvement", ms.stddev_path}};
        m["pearson_calib_path"] = ms.pearson ? json(*ms.pearson) : json();
        m["spearman_calib_path"] = ms.spearman ? json(*ms.spearman) : json();
        json pct = json::object();
        for (const auto& [p, v] : ms.path_percentiles)
            pct[std::to_string(p)] = v;
        m["path_percentiles"] = std::move(pct);
        out[method_name(method)] = std::move(m);
    }
    return out;
}

json to_json(const Heatmap& hm) {
    json cells = json::array();
    for (std::size_t i = 0; i < hm.n_sum(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < hm.n_spread(); ++j) {
            const auto& c = hm.cells[i * hm.n_spread() + j];
            row.push_back(c ? json(*c) : json());
        }
        cells.push_back(std::move(row));
    }
    json counts = json::array();
    for (std::size_t i = 0; i < hm.n_sum(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < hm.n_spread(); ++j)
            row.push_back(hm.counts[i * hm.n_spread() + j]);
        counts.push_back(std::move(row));
    }
    return {{"sum_edges", hm.sum_edges},
            {"spread_edges", hm.spread_edges},
            {"mean_path_improvement", std::move(cells)},
            {"counts", std::move(counts)}};
}

const char* const kRecordCsvHeader =
    "variant_id,method,calib_ids,calib_sum,calib_spread,baseline_path_err,"
    "corrected_path_err,baseline_calib_err,corrected_calib_err,"
    "path_improvement,calib_improvement,flag";

std::string record_to_csv(const EvaluationRecord& rec) {
    std::ostringstream os;
    os << rec.variant_id << ',' << method_name(rec.method) << ',' << rec.calib_ids[0] << '-'
       << rec.calib_ids[1] << '-' << rec.calib_ids[2] << ',' << format_double(rec.calib_sum)
       << ',' << format_double(rec.calib_spread) << ',' << format_double(rec.baseline_path_err)
       << ',' << format_double(rec.corrected_path_err) << ','
       << format_double(rec.baseline_calib_err) << ','
       << format_double(rec.corrected_calib_err) << ','
       << format_double(rec.path_improvement) << ','
       << format_double(rec.calib_improvement) << ',' << flag_name(rec.flag);
    return os.str();
}

EvaluationRecord record_from_csv(const std::string& line) {
    const auto f = split_csv(line);
    if (f.size() != 12)
        throw OutOfRange("record line must have 12 fields");
    EvaluationRecord rec;
    rec.variant_id = std::stoi(f[0]);
    rec.method = method_from_name(f[1]);
    if (std::sscanf(f[2].c_str(), "%d-%d-%d", &rec.calib_ids[0], &rec.calib_ids[1],
                    &rec.calib_ids[2]) != 3)
        throw OutOfRange("calib_ids must be i-j-k");
    rec.calib_sum = std::stod(f[3]);
    rec.calib_spread = std::stod(f[4]);
    rec.baseline_path_err = std::stod(f[5]);
    rec.corrected_path_err = std::stod(f[6]);
    rec.baseline_calib_err = std::stod(f[7]);
    rec.corrected_calib_err = std::stod(f[8]);
    rec.path_improvement = std::stod(f[9]);
    rec.calib_improvement = std::stod(f[10]);
    rec.flag = flag_from_name(f[11]);
    return rec;
}

void write_records_csv(std::ostream& os, const std::vector<EvaluationRecord>& records) {
    os << kRecordCsvHeader << '\n';
    for (const auto& r : records)
        os << record_to_csv(r) << '\n';
}

std::vector<EvaluationRecord> read_records_csv(std::istream& is) {
    std::vector<EvaluationRecord> out;
    std::string line;
    if (!std::getline(is, line))
        return out;
    if (line != kRecordCsvHeader)
        throw OutOfRange("unexpected record CSV header");
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        out.push_back(record_from_csv(line));
    }
    return out;
}

void write_variants_jsonl(std::ostream& os, const std::vector<TrapezoidVariant>& variants) {
    for (const auto& v : variants)
        os << to_json(v).dump() << '\n';
}

std::vector<TrapezoidVariant> read_variants_jsonl(std::istream& is) {
    std::vector<TrapezoidVariant> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        out.push_back(variant_from_json(json::parse(line)));
    }
    return out;
}

void write_trace_jsonl(std::ostream& os, const std::vector<TraceEntry>& trace) {
    for (const auto& t : trace)
        os << json{{"evaluation", t.evaluation},
                   {"coordinate", t.coordinate},
                   {"delta", t.delta},
                   {"objective", t.objective}}
                  .dump()
           << '\n';
}

json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw OutOfRange("cannot open " + path);
    return json::parse(is);
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream os(path);
    if (!os)
        throw OutOfRange("cannot write " + path);
    os << j.dump(2) << '\n';
}

void save_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os)
        throw OutOfRange("cannot write " + path);
    os << text;
}

} // namespace groundmap
