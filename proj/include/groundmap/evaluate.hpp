#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "groundmap/correct_gd.hpp"
#include "groundmap/correct_regression.hpp"
#include "groundmap/perturb.hpp"
#include "groundmap/simulator.hpp"

namespace groundmap {

enum class Method { regression, gd, hybrid };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

enum class RecordFlag { ok, undefined_baseline, horizon_failure };

std::string flag_name(RecordFlag f);
RecordFlag flag_from_name(const std::string& name);

struct EvaluationRecord {
    int variant_id = 0;
    Method method = Method::regression;
    std::array<int, 3> calib_ids{};
    double calib_sum = 0.0;    // sum of calibration distances (m)
    double calib_spread = 0.0; // max - min calibration distance (m)
    double baseline_path_err = 0.0;
    double corrected_path_err = 0.0;
    double baseline_calib_err = 0.0;
    double corrected_calib_err = 0.0;
    double path_improvement = 0.0;  // percent
    double calib_improvement = 0.0; // percent
    RecordFlag flag = RecordFlag::ok;
};

struct EvalConfig {
    std::vector<double> calib_candidates; // candidate calibration distances (m)
    GdConfig gd;
    double scale = 1.0; // map units -> meters
    CameraOrigin origin;
    std::uint64_t seed = 0;
    double hybrid_threshold = 75.0; // percent calibration improvement
};

/// Evenly spaced candidate distances over [calib_min, calib_max].
std::vector<double> default_candidates(const Scene& scene, int count = 10);

/// All C(n, 3) index triplets over the candidate list, lexicographic.
std::vector<std::array<int, 3>> all_triplets(int n);

/// Runs the blind protocol for one (variant, method, triplet): correction
/// parameters see only the three calibration samples; trajectories are
/// mapped afterwards for scoring.
EvaluationRecord evaluate_variant(const TrapezoidVariant& variant, const Scene& scene,
                                  Method method, const std::array<int, 3>& triplet,
                                  const EvalConfig& cfg);

struct MethodStats {
    long n_valid = 0;
    long n_flagged = 0;
    double frac_positive_path = 0.0;
    double frac_positive_calib = 0.0;
    double mean_path = 0.0;
    double median_path = 0.0;
    double stddev_path = 0.0;
    std::optional<double> pearson;  // calib vs path improvement
    std::optional<double> spearman;
    std::map<int, double> path_percentiles; // keys 1, 25, 50, 75, 99
};

struct AggregateStats {
    std::map<Method, MethodStats> per_method;
};

/// Flagged records are excluded (and counted). Throws InsufficientData
/// when no valid records exist at all; an undefined correlation is
/// reported as absent, not an error.
AggregateStats aggregate(const std::vector<EvaluationRecord>& records);

struct Heatmap {
    std::vector<double> sum_edges;
    std::vector<double> spread_edges;
    std::vector<std::optional<double>> cells; // row-major [sum_bin][spread_bin]
    std::vector<long> counts;

    std::size_t n_sum() const { return sum_edges.size() - 1; }
    std::size_t n_spread() const { return spread_edges.size() - 1; }
};

/// Mean path improvement per (calibration distance sum, spread) cell.
Heatmap heatmap(const std::vector<EvaluationRecord>& records,
                const std::vector<double>& sum_edges,
                const std::vector<double>& spread_edges);

/// Hybrid selection rule: regression when its calibration improvement
/// reaches the threshold, coordinate descent otherwise.
Method hybrid_select(const EvaluationRecord& regression_record,
                     const EvaluationRecord& gd_record, double threshold_percent);

} // namespace groundmap
