#include "groundmap/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace groundmap {

json to_json(const RunConfig& cfg) {
    json methods = json::array();
    for (Method m : cfg.methods)
        methods.push_back(method_name(m));
    return {{"scene", to_json(cfg.scene)},
            {"perturbation", to_json(cfg.perturbation)},
            {"methods", std::move(methods)},
            {"gd", to_json(cfg.gd)},
            {"n_calib_candidates", cfg.n_calib_candidates},
            {"scale", cfg.scale},
            {"hybrid_threshold", cfg.hybrid_threshold},
            {"seed", cfg.seed},
            {"jobs", cfg.jobs}};
}

RunConfig run_config_from_json(const json& j) {
    RunConfig cfg;
    if (j.contains("scene"))
        cfg.scene = scene_spec_from_json(j["scene"]);
    if (j.contains("perturbation"))
        cfg.perturbation = perturbation_spec_from_json(j["perturbation"]);
    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& m : j["methods"])
            cfg.methods.push_back(method_from_name(m.get<std::string>()));
    }
    if (j.contains("gd"))
        cfg.gd = gd_config_from_json(j["gd"]);
    cfg.n_calib_candidates = j.value("n_calib_candidates", cfg.n_calib_candidates);
    cfg.scale = j.value("scale", cfg.scale);
    cfg.hybrid_threshold = j.value("hybrid_threshold", cfg.hybrid_threshold);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.jobs = j.value("jobs", cfg.jobs);
    return cfg;
}

std::vector<EvaluationRecord> evaluate_all(const Scene& scene,
                                           const std::vector<TrapezoidVariant>& variants,
                                           const RunConfig& cfg) {
    EvalConfig ecfg;
    ecfg.calib_candidates = default_candidates(scene, cfg.n_calib_candidates);
    ecfg.gd = cfg.gd;
    ecfg.scale = cfg.scale;
    ecfg.seed = cfg.seed;
    ecfg.hybrid_threshold = cfg.hybrid_threshold;

    const auto triplets = all_triplets(cfg.n_calib_candidates);

    bool want_hybrid = false;
    std::vector<Method> base_methods;
    for (Method m : cfg.methods) {
        if (m == Method::hybrid)
            want_hybrid = true;
        else
            base_methods.push_back(m);
    }
    // Hybrid needs both underlying methods.
    if (want_hybrid) {
        for (Method m : {Method::regression, Method::gd})
            if (std::find(base_methods.begin(), base_methods.end(), m) == base_methods.end())
                base_methods.push_back(m);
    }

    struct Task {
        std::size_t variant = 0;
        std::size_t triplet = 0;
    };
    std::vector<Task> tasks;
    tasks.reserve(variants.size() * triplets.size());
    for (std::size_t vi = 0; vi < variants.size(); ++vi)
        for (std::size_t ti = 0; ti < triplets.size(); ++ti)
            tasks.push_back({vi, ti});

    // Per task we store one record per base method (fixed order), so the
    // output layout is independent of scheduling.
    std::vector<std::vector<EvaluationRecord>> results(tasks.size());

    auto worker_body = [&](std::size_t task_idx) {
        const Task& t = tasks[task_idx];
        std::vector<EvaluationRecord> recs;
        recs.reserve(base_methods.size());
        for (Method m : base_methods)
            recs.push_back(evaluate_variant(variants[t.variant], scene, m,
                                            triplets[t.triplet], ecfg));
        results[task_idx] = std::move(recs);
    };

    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i)
            worker_body(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < tasks.size();
                     i = next.fetch_add(1))
                    worker_body(i);
            });
        for (auto& th : pool)
            th.join();
    }

    std::vector<EvaluationRecord> out;
    out.reserve(tasks.size() * (base_methods.size() + (want_hybrid ? 1 : 0)));
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const EvaluationRecord* reg = nullptr;
        const EvaluationRecord* gd = nullptr;
        for (std::size_t mi = 0; mi < base_methods.size(); ++mi) {
            const auto& rec = results[i][mi];
            if (rec.method == Method::regression)
                reg = &rec;
            else if (rec.method == Method::gd)
                gd = &rec;
            out.push_back(rec);
        }
        if (want_hybrid && reg && gd) {
            const Method pick =
                reg->flag == RecordFlag::ok
                    ? hybrid_select(*reg, *gd, ecfg.hybrid_threshold)
                    : Method::gd;
            EvaluationRecord hyb = pick == Method::regression ? *reg : *gd;
            hyb.method = Method::hybrid;
            out.push_back(hyb);
        }
    }
    return out;
}

void run_pipeline(const RunConfig& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    save_json_file(out_dir + "/config.json", to_json(cfg));

    const Scene scene = generate_scene(cfg.scene, cfg.seed);
    save_json_file(out_dir + "/scene.json", to_json(scene));

    const auto variants = generate_variants(scene.trapezoid.image, scene.trapezoid.ground,
                                            cfg.perturbation, cfg.seed);
    {
        std::ofstream os(out_dir + "/variants.jsonl");
        write_variants_jsonl(os, variants);
    }

    const auto records = evaluate_all(scene, variants, cfg);
    {
        std::ofstream os(out_dir + "/records.csv");
        write_records_csv(os, records);
    }

    const AggregateStats stats = aggregate(records);
    save_json_file(out_dir + "/aggregates.json", to_json(stats));
}

std::string render_report(const AggregateStats& stats) {
    std::ostringstream os;
    std::vector<Method> methods;
    for (const auto& [m, _] : stats.per_method)
        methods.push_back(m);

    os << std::left << std::setw(32) << "Metric";
    for (Method m : methods)
        os << std::right << std::setw(14) << method_name(m);
    os << '\n';
    os << std::string(32 + 14 * methods.size(), '-') << '\n';

    auto row = [&](const std::string& label, auto getter, const char* suffix) {
        os << std::left << std::setw(32) << label;
        for (Method m : methods) {
            const auto& ms = stats.per_method.at(m);
            os << std::right << std::setw(12) << std::fixed << std::setprecision(1)
               << getter(ms) << std::setw(2) << suffix;
        }
        os << '\n';
    };
    row("Positive path improvement", [](const MethodStats& s) { return 100.0 * s.frac_positive_path; }, "%");
    row("Positive calib. improvement", [](const MethodStats& s) { return 100.0 * s.frac_positive_calib; }, "%");
    row("Mean path improvement", [](const MethodStats& s) { return s.mean_path; }, "%");
    row("Median path improvement", [](const MethodStats& s) { return s.median_path; }, "%");
    os << std::left << std::setw(32) << "Path-calib. correlation";
    for (Method m : methods) {
        const auto& ms = stats.per_method.at(m);
        if (ms.pearson)
            os << std::right << std::setw(12) << std::fixed << std::setprecision(2)
               << *ms.pearson << std::setw(2) << "";
        else
            os << std::right << std::setw(14) << "n/a";
    }
    os << '\n';
    row("1st pct path improvement", [](const MethodStats& s) {
        const auto it = s.path_percentiles.find(1);
        return it != s.path_percentiles.end() ? it->second : 0.0;
    }, "%");
    os << std::left << std::setw(32) << "Valid / flagged records";
    for (Method m : methods) {
        const auto& ms = stats.per_method.at(m);
        std::ostringstream cell;
        cell << ms.n_valid << "/" << ms.n_flagged;
        os << std::right << std::setw(14) << cell.str();
    }
    os << '\n';
    return os.str();
}

} // namespace groundmap
