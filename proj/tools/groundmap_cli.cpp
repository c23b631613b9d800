// groundmap: model, reproduce and correct the range-dependent distance
// error of homography-based ground-plane mapping.
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 numeric degeneracy.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "groundmap/depth_model.hpp"
#include "groundmap/pipeline.hpp"

namespace gm = groundmap;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::string default_out_dir() {
    const char* env = std::getenv("GROUNDMAP_OUT_DIR");
    return env ? env : "out";
}

gm::SceneSpec load_scene_spec(const std::string& path, const std::string& preset) {
    gm::SceneSpec spec;
    if (preset == "scene2") {
        spec.id = "scene2";
        spec.calib_max = 49.0;
    }
    if (!path.empty())
        spec = gm::scene_spec_from_json(gm::load_json_file(path));
    return spec;
}

int cmd_simulate(const std::string& spec_path, const std::string& preset,
                 std::uint64_t seed, const std::string& out) {
    const gm::SceneSpec spec = load_scene_spec(spec_path, preset);
    const gm::Scene scene = gm::generate_scene(spec, seed);
    gm::save_json_file(out, gm::to_json(scene));
    std::cout << "scene '" << scene.id << "' with " << scene.trajectories.size()
              << " trajectories -> " << out << "\n";
    return 0;
}

int cmd_perturb(const std::string& base_path, const std::string& spec_path,
                std::uint64_t seed, const std::string& out) {
    const gm::Scene scene = gm::scene_from_json(gm::load_json_file(base_path));
    gm::PerturbationSpec spec;
    if (!spec_path.empty())
        spec = gm::perturbation_spec_from_json(gm::load_json_file(spec_path));
    if (!spec.valid())
        throw gm::OutOfRange("invalid perturbation spec");
    const auto variants = gm::generate_variants(scene.trapezoid.image, scene.trapezoid.ground,
                                                spec, seed);
    std::ofstream os(out);
    if (!os)
        throw gm::OutOfRange("cannot write " + out);
    gm::write_variants_jsonl(os, variants);
    std::cout << variants.size() << " variants -> " << out << "\n";
    return 0;
}

std::vector<double> parse_distances(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        out.push_back(std::stod(tok));
    return out;
}

int cmd_correct(const std::string& method, const std::string& scene_path,
                const std::string& variants_path, int variant_id,
                const std::string& distances_csv, const gm::GdConfig& gd_cfg,
                const std::string& out, const std::string& trace_out) {
    const gm::Scene scene = gm::scene_from_json(gm::load_json_file(scene_path));
    gm::TrapezoidVariant variant;
    if (!variants_path.empty()) {
        std::ifstream is(variants_path);
        if (!is)
            throw gm::OutOfRange("cannot open " + variants_path);
        const auto variants = gm::read_variants_jsonl(is);
        const auto it = std::find_if(variants.begin(), variants.end(),
                                     [&](const auto& v) { return v.id == variant_id; });
        if (it == variants.end())
            throw gm::OutOfRange("variant id not found in " + variants_path);
        variant = *it;
    } else {
        variant.src = scene.trapezoid.image;
        variant.dst = scene.trapezoid.ground;
    }

    const auto distances = parse_distances(distances_csv);
    if (distances.size() != 3)
        throw gm::OutOfRange("--distances must list exactly three values");
    const auto samples = gm::calibration_points(scene, distances);
    const gm::Homography H = gm::compute_homography(variant.src, variant.dst);
    const gm::CameraOrigin origin;

    if (method == "regression") {
        const auto errors = gm::calib_errors(H, 1.0, samples, origin);
        const gm::ErrorModel model = gm::fit_error_model(errors, origin);
        gm::save_json_file(out, gm::to_json(model));
        std::cout << "error model -> " << out << "\n";
    } else {
        gm::GdContext ctx;
        ctx.dst = variant.dst;
        ctx.samples = samples;
        ctx.origin = origin;
        ctx.initial = gm::flatten(variant.src);
        const gm::GdResult res = gm::optimize(ctx.initial, ctx, gd_cfg);
        gm::json j = {{"vertices", res.vertices},
                      {"initial_objective", res.initial_objective},
                      {"final_objective", res.final_objective},
                      {"evaluations", res.evaluations}};
        gm::save_json_file(out, j);
        if (!trace_out.empty()) {
            std::ofstream os(trace_out);
            gm::write_trace_jsonl(os, res.trace);
        }
        std::cout << "objective " << res.initial_objective << " -> " << res.final_objective
                  << " in " << res.evaluations << " evaluations; " << out << "\n";
    }
    return 0;
}

int cmd_evaluate(gm::RunConfig cfg, const std::string& scene_path,
                 const std::string& variants_path, const std::string& out) {
    const gm::Scene scene = gm::scene_from_json(gm::load_json_file(scene_path));
    std::ifstream is(variants_path);
    if (!is)
        throw gm::OutOfRange("cannot open " + variants_path);
    const auto variants = gm::read_variants_jsonl(is);
    const auto records = gm::evaluate_all(scene, variants, cfg);
    std::ofstream os(out);
    if (!os)
        throw gm::OutOfRange("cannot write " + out);
    gm::write_records_csv(os, records);
    std::cout << records.size() << " records -> " << out << "\n";
    return 0;
}

int cmd_report(const std::string& records_path, const std::string& out,
               const std::string& heatmap_out, int sum_bins, int spread_bins) {
    std::ifstream is(records_path);
    if (!is)
        throw gm::OutOfRange("cannot open " + records_path);
    const auto records = gm::read_records_csv(is);
    const gm::AggregateStats stats = gm::aggregate(records);
    if (!out.empty())
        gm::save_json_file(out, gm::to_json(stats));
    if (!heatmap_out.empty()) {
        double sum_lo = 1e300, sum_hi = -1e300, sp_lo = 1e300, sp_hi = -1e300;
        for (const auto& r : records) {
            if (r.flag != gm::RecordFlag::ok)
                continue;
            sum_lo = std::min(sum_lo, r.calib_sum);
            sum_hi = std::max(sum_hi, r.calib_sum);
            sp_lo = std::min(sp_lo, r.calib_spread);
            sp_hi = std::max(sp_hi, r.calib_spread);
        }
        auto edges = [](double lo, double hi, int n) {
            std::vector<double> e;
            for (int i = 0; i <= n; ++i)
                e.push_back(lo + (hi - lo) * i / n);
            return e;
        };
        const gm::Heatmap hm = gm::heatmap(records, edges(sum_lo, sum_hi, sum_bins),
                                           edges(sp_lo, sp_hi, spread_bins));
        gm::save_json_file(heatmap_out, gm::to_json(hm));
    }
    std::cout << gm::render_report(stats);
    return 0;
}

int cmd_validate_theory(const std::vector<double>& eps_values, const gm::CameraModel& cam,
                        const std::string& out) {
    const gm::TrapezoidPair trap = gm::true_trapezoid(cam, 5.0, 50.0, 3.5);
    const gm::Homography H = gm::compute_homography(trap.image, trap.ground);
    const gm::ColumnDepthModel model = gm::column_model(H, cam.cx());
    if (model.affine())
        throw gm::AffineColumn("center column has no horizon");

    std::ostringstream csv;
    csv << "eps,u,v,Y,exact_error,approx_error\n";
    bool all_ok = true;
    for (double eps : eps_values) {
        // Log-log fit of |exact error| against Y = scale / (v - horizon).
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (double dist = 10.0; dist <= 50.0; dist += 1.0) {
            const double v = *model.horizon + *model.scale / dist;
            const double exact = gm::exact_error(model, v, eps);
            const double approx = gm::approx_error(model, dist, eps);
            csv << gm::format_double(eps) << ',' << gm::format_double(model.u) << ','
                << gm::format_double(v) << ',' << gm::format_double(dist) << ','
                << gm::format_double(exact) << ',' << gm::format_double(approx) << '\n';
            const double lx = std::log(dist);
            const double ly = std::log(std::abs(exact));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++n;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        std::cout << "eps=" << eps << " px: log-log slope " << slope << "\n";
        if (slope < 1.9 || slope > 2.1)
            all_ok = false;
    }
    if (!out.empty())
        gm::save_text_file(out, csv.str());
    if (!all_ok) {
        std::cerr << "slope outside [1.9, 2.1]\n";
        return kExitNumeric;
    }
    return 0;
}

int cmd_analyze(double eps, const gm::CameraModel& cam, const std::string& out) {
    const gm::TrapezoidPair trap = gm::true_trapezoid(cam, 5.0, 50.0, 3.5);
    const gm::Homography H = gm::compute_homography(trap.image, trap.ground);

    std::ostringstream csv;
    csv << "u,v,Y,exact_error,approx_error\n";
    for (double u : {cam.cx() / 2.0, cam.cx(), 1.5 * cam.cx()}) {
        const gm::ColumnDepthModel model = gm::column_model(H, u);
        if (model.affine())
            continue;
        const double v_lo = *model.horizon + 20.0;
        for (double v = v_lo; v <= cam.height; v += 5.0) {
            const double y = model.depth_at(v);
            csv << gm::format_double(u) << ',' << gm::format_double(v) << ','
                << gm::format_double(y) << ','
                << gm::format_double(gm::exact_error(model, v, eps)) << ','
                << gm::format_double(gm::approx_error(model, *model.scale / (v - *model.horizon), eps))
                << '\n';
        }
    }
    gm::save_text_file(out, csv.str());
    std::cout << "error table -> " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Homography ground-plane mapping error analysis and correction"};
    app.require_subcommand(1);

    std::uint64_t seed = 42;
    std::string out_dir = default_out_dir();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a scene with exact ground truth");
    std::string sim_spec, sim_preset = "scene1", sim_out = "scene.json";
    sim->add_option("--scene", sim_spec, "Scene spec JSON (overrides --preset)");
    sim->add_option("--preset", sim_preset, "Built-in scene preset (scene1|scene2)")
        ->check(CLI::IsMember({"scene1", "scene2"}));
    sim->add_option("--seed", seed, "PRNG seed");
    sim->add_option("--out", sim_out, "Output scene JSON");

    // perturb
    auto* per = app.add_subcommand("perturb", "Generate perturbed trapezoid variants");
    std::string per_base, per_spec, per_out = "variants.jsonl";
    per->add_option("--base", per_base, "Scene JSON providing the base trapezoid")->required();
    per->add_option("--spec", per_spec, "Perturbation spec JSON");
    per->add_option("--seed", seed, "PRNG seed");
    per->add_option("--out", per_out, "Output variants JSON-lines");

    // correct
    auto* cor = app.add_subcommand("correct", "Fit a correction for one trapezoid variant");
    std::string cor_method = "regression", cor_scene, cor_variants, cor_out = "correction.json",
                cor_trace, cor_dist = "5,25,44";
    int cor_variant_id = 0;
    gm::GdConfig gd_cfg;
    cor->add_option("--method", cor_method, "regression|gd")
        ->check(CLI::IsMember({"regression", "gd"}));
    cor->add_option("--scene", cor_scene, "Scene JSON")->required();
    cor->add_option("--variants", cor_variants, "Variants JSON-lines (omit to use the true trapezoid)");
    cor->add_option("--variant-id", cor_variant_id, "Variant to correct");
    cor->add_option("--distances", cor_dist, "Three calibration distances (m), comma separated");
    cor->add_option("--delta-max", gd_cfg.delta_max, "Vertex displacement box (px)");
    cor->add_option("--coarse-grid", gd_cfg.coarse_grid, "Coarse grid displacements (px)");
    cor->add_option("--fine-steps", gd_cfg.fine_steps, "Descent step schedule (px)");
    cor->add_option("--budget", gd_cfg.budget, "Max objective evaluations");
    cor->add_option("--patience", gd_cfg.patience, "Improvement-free passes per step");
    cor->add_option("--seed", gd_cfg.seed, "Descent seed");
    cor->add_option("--out", cor_out, "Output JSON");
    cor->add_option("--trace", cor_trace, "Optional descent trace JSON-lines");

    // evaluate
    auto* eva = app.add_subcommand("evaluate", "Monte-Carlo evaluation over variants and triplets");
    std::string eva_scene, eva_variants, eva_out = "records.csv", eva_method = "both";
    gm::RunConfig run_cfg;
    eva->add_option("--scene", eva_scene, "Scene JSON")->required();
    eva->add_option("--variants", eva_variants, "Variants JSON-lines")->required();
    eva->add_option("--method", eva_method, "regression|gd|both|hybrid")
        ->check(CLI::IsMember({"regression", "gd", "both", "hybrid"}));
    eva->add_option("--candidates", run_cfg.n_calib_candidates, "Calibration candidate count");
    eva->add_option("--jobs", run_cfg.jobs, "Worker threads");
    eva->add_option("--seed", run_cfg.seed, "Seed for per-task descent RNG");
    eva->add_option("--hybrid-threshold", run_cfg.hybrid_threshold,
                    "Calibration improvement threshold (percent)");
    eva->add_option("--budget", run_cfg.gd.budget, "Descent evaluation budget");
    eva->add_option("--out", eva_out, "Output records CSV");

    // report
    auto* rep = app.add_subcommand("report", "Aggregate records into summary statistics");
    std::string rep_records, rep_out, rep_heatmap;
    int rep_sum_bins = 8, rep_spread_bins = 8;
    rep->add_option("--records", rep_records, "Records CSV")->required();
    rep->add_option("--out", rep_out, "Aggregates JSON");
    rep->add_option("--heatmap", rep_heatmap, "Heatmap JSON over (distance sum, spread)");
    rep->add_option("--sum-bins", rep_sum_bins, "Heatmap bins along the distance sum");
    rep->add_option("--spread-bins", rep_spread_bins, "Heatmap bins along the spread");

    // validate-theory
    auto* val = app.add_subcommand("validate-theory",
                                   "Check the quadratic error growth law empirically");
    std::vector<double> val_eps = {1.0};
    std::string val_out;
    gm::CameraModel cam;
    val->add_option("--eps", val_eps, "Horizon shifts to test (px)");
    val->add_option("--out", val_out, "Error table CSV");
    val->add_option("--fov", cam.fov_h_deg, "Horizontal field of view (deg)");
    val->add_option("--height", cam.height_m, "Mounting height (m)");
    val->add_option("--tilt", cam.tilt_deg, "Downward tilt (deg)");

    // analyze
    auto* ana = app.add_subcommand("analyze", "Emit per-column error curves as CSV");
    double ana_eps = 1.0;
    std::string ana_out = "analysis.csv";
    ana->add_option("--eps", ana_eps, "Horizon shift (px)");
    ana->add_option("--out", ana_out, "Output CSV");

    // run: whole pipeline into a directory
    auto* run = app.add_subcommand("run", "Full pipeline: simulate, perturb, evaluate, report");
    std::string run_config_path;
    run->add_option("--config", run_config_path, "RunConfig JSON (defaults used if omitted)");
    run->add_option("--out-dir", out_dir, "Output directory");
    run->add_option("--seed", run_cfg.seed, "PRNG seed");
    run->add_option("--jobs", run_cfg.jobs, "Worker threads");
    run->add_option("--variants", run_cfg.perturbation.n_variants, "Variant count");
    run->add_option("--candidates", run_cfg.n_calib_candidates, "Calibration candidate count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(sim_spec, sim_preset, seed, sim_out);
        if (per->parsed())
            return cmd_perturb(per_base, per_spec, seed, per_out);
        if (cor->parsed())
            return cmd_correct(cor_method, cor_scene, cor_variants, cor_variant_id, cor_dist,
                               gd_cfg, cor_out, cor_trace);
        if (eva->parsed()) {
            if (eva_method == "both")
                run_cfg.methods = {gm::Method::regression, gm::Method::gd};
            else
                run_cfg.methods = {gm::method_from_name(eva_method)};
            return cmd_evaluate(run_cfg, eva_scene, eva_variants, eva_out);
        }
        if (rep->parsed())
            return cmd_report(rep_records, rep_out, rep_heatmap, rep_sum_bins, rep_spread_bins);
        if (val->parsed())
            return cmd_validate_theory(val_eps, cam, val_out);
        if (ana->parsed())
            return cmd_analyze(ana_eps, cam, ana_out);
        if (run->parsed()) {
            gm::RunConfig cfg = run_cfg;
            if (!run_config_path.empty()) {
                cfg = gm::run_config_from_json(gm::load_json_file(run_config_path));
                // Command-line seed/jobs still win over the file.
                for (const auto* opt : {run->get_option("--seed")})
                    if (opt->count() > 0)
                        cfg.seed = run_cfg.seed;
                if (run->get_option("--jobs")->count() > 0)
                    cfg.jobs = run_cfg.jobs;
            }
            gm::run_pipeline(cfg, out_dir);
            std::cout << "pipeline outputs in " << out_dir << "\n";
            return 0;
        }
    } catch (const gm::SingularSystem& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const gm::AtHorizon& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const gm::InsufficientData& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const gm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const gm::json::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
