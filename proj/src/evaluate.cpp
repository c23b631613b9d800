#include "groundmap/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "groundmap/depth_model.hpp"
#include "groundmap/rng.hpp"

namespace groundmap {

namespace {

constexpr double kBaselineFloor = 1e-12;

double mean_abs_path_error(const Homography& H, double scale, const Scene& scene) {
    double sum = 0.0;
    long n = 0;
    for (const auto& traj : scene.trajectories) {
        for (const auto& g : traj) {
            const Projection pr = project(scene.camera, g);
            const GroundPoint raw = map_point(H, pr.pixel);
            const GroundPoint p{raw.x * scale, raw.y * scale};
            sum += std::hypot(p.x - g.x, p.y - g.y);
            ++n;
        }
    }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

double mean_abs_path_error_corrected(const Homography& H, double scale, const Scene& scene,
                                     const ErrorModel& model, const CameraOrigin& origin) {
    double sum = 0.0;
    long n = 0;
    for (const auto& traj : scene.trajectories) {
        for (const auto& g : traj) {
            const Projection pr = project(scene.camera, g);
            const GroundPoint raw = map_point(H, pr.pixel);
            const GroundPoint p = apply_correction({raw.x * scale, raw.y * scale}, model, origin);
            sum += std::hypot(p.x - g.x, p.y - g.y);
            ++n;
        }
    }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

double improvement(double baseline, double corrected) {
    return 100.0 * (1.0 - corrected / baseline);
}

double percentile(std::vector<double> sorted, double pct) {
    // sorted must be ascending; linear interpolation between ranks.
    if (sorted.empty())
        return 0.0;
    const double rank = pct / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = static_cast<std::size_t>(std::ceil(rank));
    const double frac = rank - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

std::optional<double> pearson_corr(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    if (n < 2)
        return std::nullopt;
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
        sab += (a[i] - ma) * (b[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0)
        return std::nullopt;
    return sab / std::sqrt(saa * sbb);
}

std::vector<double> ranks(const std::vector<double>& x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
    std::vector<double> r(x.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]])
            ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

} // namespace

std::string method_name(Method m) {
    switch (m) {
    case Method::regression: return "regression";
    case Method::gd: return "gd";
    case Method::hybrid: return "hybrid";
    }
    return "unknown";
}

Method method_from_name(const std::string& name) {
    if (name == "regression")
        return Method::regression;
    if (name == "gd")
        return Method::gd;
    if (name == "hybrid")
        return Method::hybrid;
    throw OutOfRange("unknown method: " + name);
}

std::string flag_name(RecordFlag f) {
    switch (f) {
    case RecordFlag::ok: return "ok";
    case RecordFlag::undefined_baseline: return "undefined_baseline";
    case RecordFlag::horizon_failure: return "horizon_failure";
    }
    return "unknown";
}

RecordFlag flag_from_name(const std::string& name) {
    if (name == "ok")
        return RecordFlag::ok;
    if (name == "undefined_baseline")
        return RecordFlag::undefined_baseline;
    if (name == "horizon_failure")
        return RecordFlag::horizon_failure;
    throw OutOfRange("unknown record flag: " + name);
}

std::vector<double> default_candidates(const Scene& scene, int count) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double t = count > 1 ? static_cast<double>(i) / (count - 1) : 0.0;
        out.push_back(scene.calib_min + t * (scene.calib_max - scene.calib_min));
    }
    return out;
}

std::vector<std::array<int, 3>> all_triplets(int n) {
    std::vector<std::array<int, 3>> out;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                out.push_back({i, j, k});
    return out;
}

EvaluationRecord evaluate_variant(const TrapezoidVariant& variant, const Scene& scene,
                                  Method method, const std::array<int, 3>& triplet,
                                  const EvalConfig& cfg) {
    if (method == Method::hybrid)
        throw OutOfRange("hybrid records are derived from paired regression/gd records");

    EvaluationRecord rec;
    rec.variant_id = variant.id;
    rec.method = method;
    rec.calib_ids = triplet;

    std::vector<double> distances;
    for (int idx : triplet)
        distances.push_back(cfg.calib_candidates.at(static_cast<std::size_t>(idx)));
    rec.calib_sum = distances[0] + distances[1] + distances[2];
    rec.calib_spread = *std::max_element(distances.begin(), distances.end()) -
                       *std::min_element(distances.begin(), distances.end());

    try {
        const auto samples = calibration_points(scene, distances);
        const Homography H = compute_homography(variant.src, variant.dst);

        const auto base_errors = calib_errors(H, cfg.scale, samples, cfg.origin);
        double base_calib = 0.0;
        for (const auto& e : base_errors)
            base_calib += e.error;
        base_calib /= 3.0;
        rec.baseline_calib_err = base_calib;
        rec.baseline_path_err = mean_abs_path_error(H, cfg.scale, scene);

        if (method == Method::regression) {
            const ErrorModel model = fit_error_model(base_errors, cfg.origin);
            double corr_calib = 0.0;
            for (const auto& e : base_errors) {
                const GroundPoint c = apply_correction(e.mapped, model, cfg.origin);
                corr_calib += std::hypot(c.x - e.truth.x, c.y - e.truth.y);
            }
            rec.corrected_calib_err = corr_calib / 3.0;
            rec.corrected_path_err =
                mean_abs_path_error_corrected(H, cfg.scale, scene, model, cfg.origin);
        } else {
            GdContext ctx;
            ctx.dst = variant.dst;
            ctx.samples = samples;
            ctx.origin = cfg.origin;
            ctx.scale = cfg.scale;
            ctx.initial = flatten(variant.src);
            GdConfig gd_cfg = cfg.gd;
            gd_cfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(variant.id),
                                   static_cast<std::uint64_t>(triplet[0] * 10000 +
                                                              triplet[1] * 100 + triplet[2]));
            const GdResult res = optimize(ctx.initial, ctx, gd_cfg);
            const Homography Hc = compute_homography(unflatten(res.vertices), variant.dst);
            const auto corr_errors = calib_errors(Hc, cfg.scale, samples, cfg.origin);
            double corr_calib = 0.0;
            for (const auto& e : corr_errors)
                corr_calib += e.error;
            rec.corrected_calib_err = corr_calib / 3.0;
            rec.corrected_path_err = mean_abs_path_error(Hc, cfg.scale, scene);
        }
    } catch (const AtHorizon&) {
        rec.flag = RecordFlag::horizon_failure;
        return rec;
    } catch (const AboveHorizon&) {
        rec.flag = RecordFlag::horizon_failure;
        return rec;
    }

    if (rec.baseline_path_err <= kBaselineFloor || rec.baseline_calib_err <= kBaselineFloor) {
        rec.flag = RecordFlag::undefined_baseline;
        rec.path_improvement = 0.0;
        rec.calib_improvement = 0.0;
        return rec;
    }
    rec.path_improvement = improvement(rec.baseline_path_err, rec.corrected_path_err);
    rec.calib_improvement = improvement(rec.baseline_calib_err, rec.corrected_calib_err);
    return rec;
}

AggregateStats aggregate(const std::vector<EvaluationRecord>& records) {
    std::map<Method, std::vector<const EvaluationRecord*>> valid;
    std::map<Method, long> flagged;
    for (const auto& r : records) {
        if (r.flag == RecordFlag::ok)
            valid[r.method].push_back(&r);
        else
            ++flagged[r.method];
    }
    if (valid.empty())
        throw InsufficientData("no valid evaluation records");

    AggregateStats stats;
    for (auto& [method, recs] : valid) {
        MethodStats ms;
        ms.n_valid = static_cast<long>(recs.size());
        ms.n_flagged = flagged.count(method) ? flagged[method] : 0;

        std::vector<double> path, calib;
        path.reserve(recs.size());
        calib.reserve(recs.size());
        long pos_path = 0, pos_calib = 0;
        for (const auto* r : recs) {
            path.push_back(r->path_improvement);
            calib.push_back(r->calib_improvement);
            if (r->path_improvement > 0.0)
                ++pos_path;
            if (r->calib_improvement > 0.0)
                ++pos_calib;
        }
        const auto n = static_cast<double>(recs.size());
        ms.frac_positive_path = static_cast<double>(pos_path) / n;
        ms.frac_positive_calib = static_cast<double>(pos_calib) / n;
        ms.mean_path = std::accumulate(path.begin(), path.end(), 0.0) / n;
        double var = 0.0;
        for (double p : path)
            var += (p - ms.mean_path) * (p - ms.mean_path);
        ms.stddev_path = recs.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;

        std::vector<double> sorted = path;
        std::sort(sorted.begin(), sorted.end());
        ms.median_path = percentile(sorted, 50.0);
        for (int p : {1, 25, 50, 75, 99})
            ms.path_percentiles[p] = percentile(sorted, static_cast<double>(p));

        ms.pearson = pearson_corr(calib, path);
        if (ms.pearson)
            ms.spearman = pearson_corr(ranks(calib), ranks(path));
        stats.per_method[method] = std::move(ms);
    }
    return stats;
}

Heatmap heatmap(const std::vector<EvaluationRecord>& records,
                const std::vector<double>& sum_edges,
                const std::vector<double>& spread_edges) {
    Heatmap hm;
    hm.sum_edges = sum_edges;
    hm.spread_edges = spread_edges;
    const std::size_t ns = hm.n_sum();
    const std::size_t np = hm.n_spread();
    hm.cells.assign(ns * np, std::nullopt);
    hm.counts.assign(ns * np, 0);
    std::vector<double> sums(ns * np, 0.0);

    auto bin_of = [](const std::vector<double>& edges, double x) -> long {
        if (x < edges.front() || x > edges.back())
            return -1;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i)
            if (x < edges[i + 1] || i + 2 == edges.size())
                return static_cast<long>(i);
        return -1;
    };

    for (const auto& r : records) {
        if (r.flag != RecordFlag::ok)
            continue;
        const long bs = bin_of(sum_edges, r.calib_sum);
        const long bp = bin_of(spread_edges, r.calib_spread);
        if (bs < 0 || bp < 0)
            continue;
        const std::size_t cell = static_cast<std::size_t>(bs) * np + static_cast<std::size_t>(bp);
        sums[cell] += r.path_improvement;
        ++hm.counts[cell];
    }
    for (std::size_t c = 0; c < hm.cells.size(); ++c)
        if (hm.counts[c] > 0)
            hm.cells[c] = sums[c] / static_cast<double>(hm.counts[c]);
    return hm;
}

Method hybrid_select(const EvaluationRecord& regression_record,
                     const EvaluationRecord& gd_record, double threshold_percent) {
    (void)gd_record;
    return regression_record.calib_improvement >= threshold_percent ? Method::regression
                                                                    : Method::gd;
}

} // namespace groundmap
