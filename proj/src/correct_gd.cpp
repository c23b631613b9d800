#include "groundmap/correct_gd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "groundmap/rng.hpp"

namespace groundmap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

VertexVector flatten(const PixelQuad& q) {
    VertexVector v{};
    for (std::size_t i = 0; i < 4; ++i) {
        v[2 * i] = q[i].u;
        v[2 * i + 1] = q[i].v;
    }
    return v;
}

PixelQuad unflatten(const VertexVector& v) {
    PixelQuad q;
    for (std::size_t i = 0; i < 4; ++i)
        q[i] = {v[2 * i], v[2 * i + 1]};
    return q;
}

bool GdConfig::valid() const {
    if (delta_max <= 0.0 || budget < 0 || patience < 1 || fine_steps.empty())
        return false;
    for (std::size_t i = 0; i < fine_steps.size(); ++i) {
        if (fine_steps[i] <= 0.0)
            return false;
        if (i > 0 && fine_steps[i] >= fine_steps[i - 1])
            return false;
    }
    return coarse_vertices[0] != coarse_vertices[1];
}

double objective(const VertexVector& v, const GdContext& ctx, const GdConfig& cfg) {
    for (std::size_t i = 0; i < 8; ++i)
        if (std::abs(v[i] - ctx.initial[i]) > cfg.delta_max + 1e-12)
            return kInf;
    const PixelQuad quad = unflatten(v);
    if (!quad_valid(quad))
        return kInf;
    try {
        const Homography H = compute_homography(quad, ctx.dst);
        const auto errors = calib_errors(H, ctx.scale, ctx.samples, ctx.origin);
        if (errors.empty())
            return kInf;
        double sum = 0.0;
        for (const auto& e : errors)
            sum += std::abs(e.error);
        return sum / static_cast<double>(errors.size());
    } catch (const Error&) {
        return kInf;
    }
}

VertexVector coarse_search(const VertexVector& v0, const GdContext& ctx, const GdConfig& cfg,
                           double& best_obj, long& evaluations,
                           std::vector<TraceEntry>& trace) {
    VertexVector best = v0;
    for (int vertex : cfg.coarse_vertices) {
        VertexVector vertex_best = best;
        double vertex_best_obj = best_obj;
        for (double du : cfg.coarse_grid) {
            for (double dv : cfg.coarse_grid) {
                if (du == 0.0 && dv == 0.0)
                    continue;
                VertexVector cand = best;
                cand[static_cast<std::size_t>(2 * vertex)] += du;
                cand[static_cast<std::size_t>(2 * vertex + 1)] += dv;
                const double f = objective(cand, ctx, cfg);
                ++evaluations;
                if (f < vertex_best_obj) {
                    vertex_best_obj = f;
                    vertex_best = cand;
                }
            }
        }
        if (vertex_best_obj < best_obj) {
            best = vertex_best;
            best_obj = vertex_best_obj;
            trace.push_back({evaluations, -1, 0.0, best_obj});
        }
    }
    return best;
}

VertexVector fine_descent(const VertexVector& v, const GdContext& ctx, const GdConfig& cfg,
                          double& best_obj, long& evaluations,
                          std::vector<TraceEntry>& trace) {
    VertexVector cur = v;
    auto rng = make_engine(mix_seed(cfg.seed, 0x6764ULL));
    std::array<int, 8> order{};
    std::iota(order.begin(), order.end(), 0);

    for (double step : cfg.fine_steps) {
        int stale_passes = 0;
        while (stale_passes < cfg.patience && evaluations < cfg.budget) {
            std::shuffle(order.begin(), order.end(), rng);
            bool improved = false;
            for (int coord : order) {
                for (double delta : {step, -step}) {
                    if (evaluations >= cfg.budget)
                        break;
                    VertexVector cand = cur;
                    cand[static_cast<std::size_t>(coord)] += delta;
                    const double f = objective(cand, ctx, cfg);
                    ++evaluations;
                    if (f < best_obj) {
                        cur = cand;
                        best_obj = f;
                        improved = true;
                        trace.push_back({evaluations, coord, delta, best_obj});
                        break; // keep the move, go to the next coordinate
                    }
                }
                if (evaluations >= cfg.budget)
                    break;
            }
            stale_passes = improved ? 0 : stale_passes + 1;
        }
        if (evaluations >= cfg.budget)
            break;
    }
    return cur;
}

GdResult optimize(const VertexVector& v0, const GdContext& ctx, const GdConfig& cfg) {
    if (!cfg.valid())
        throw OutOfRange("invalid coordinate-descent configuration");
    GdResult res;
    res.vertices = v0;
    res.initial_objective = objective(v0, ctx, cfg);
    res.final_objective = res.initial_objective;
    if (cfg.budget == 0)
        return res;

    double best_obj = res.initial_objective;
    res.vertices = coarse_search(v0, ctx, cfg, best_obj, res.evaluations, res.trace);
    res.vertices = fine_descent(res.vertices, ctx, cfg, best_obj, res.evaluations, res.trace);
    res.final_objective = best_obj;
    return res;
}

} // namespace groundmap
