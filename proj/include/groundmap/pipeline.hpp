#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "groundmap/evaluate.hpp"
#include "groundmap/io.hpp"
#include "groundmap/perturb.hpp"
#include "groundmap/simulator.hpp"

namespace groundmap {

/// One reproducible experiment: scene generation, trapezoid perturbation,
/// correction, evaluation and reporting, all keyed by a single seed.
struct RunConfig {
    SceneSpec scene;
    PerturbationSpec perturbation;
    std::vector<Method> methods = {Method::regression, Method::gd};
    GdConfig gd;
    int n_calib_candidates = 10;
    double scale = 1.0;
    double hybrid_threshold = 75.0;
    std::uint64_t seed = 42;
    int jobs = 1;
};

json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const json& j);

/// Evaluates every (variant, triplet, method) task. Parallelism never
/// changes the output: each task is a pure function of (seed, ids) and
/// results are emitted in task order. Hybrid, when requested, pairs the
/// regression/gd records per task and appends the selected record
/// relabeled as hybrid.
std::vector<EvaluationRecord> evaluate_all(const Scene& scene,
                                           const std::vector<TrapezoidVariant>& variants,
                                           const RunConfig& cfg);

/// Full pipeline into out_dir: config.json, scene.json, variants.jsonl,
/// records.csv, aggregates.json. Byte-identical for identical
/// (config, seed), independent of cfg.jobs.
void run_pipeline(const RunConfig& cfg, const std::string& out_dir);

/// Text table over aggregate statistics, one row per metric.
std::string render_report(const AggregateStats& stats);

} // namespace groundmap
