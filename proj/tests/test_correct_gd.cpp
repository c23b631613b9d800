#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "groundmap/correct_gd.hpp"
#include "groundmap/perturb.hpp"

using namespace groundmap;

namespace {

GdContext make_context(const Scene& scene, const PixelQuad& start) {
    GdContext ctx;
    ctx.dst = scene.trapezoid.ground;
    ctx.samples = calibration_points(scene, {5.0, 25.0, 44.0});
    ctx.initial = flatten(start);
    return ctx;
}

} // namespace

TEST_CASE("objective at the true trapezoid is essentially zero") {
    const Scene scene = generate_scene(SceneSpec{}, 1);
    const GdContext ctx = make_context(scene, scene.trapezoid.image);
    const GdConfig cfg;
    CHECK(objective(ctx.initial, ctx, cfg) < 1e-6);
}

TEST_CASE("objective equals an independent recomputation") {
    const Scene scene = generate_scene(SceneSpec{}, 1);
    PixelQuad start = scene.trapezoid.image;
    start[0].u += 3.0;
    start[2].v -= 2.0;
    const GdContext ctx = make_context(scene, start);
    const GdConfig cfg;
    const double f = objective(ctx.initial, ctx, cfg);
    CHECK(f >= 0.0);

    // Brute-force recomputation through map_point.
    const Homography H = compute_homography(start, ctx.dst);
    double sum = 0.0;
    for (const auto& s : ctx.samples) {
        const GroundPoint p = map_point(H, s.pixel);
        sum += std::hypot(p.x - s.truth.x, p.y - s.truth.y);
    }
    CHECK(f == doctest::Approx(sum / 3.0).epsilon(1e-12));
}

TEST_CASE("objective returns the infeasibility sentinel") {
    const Scene scene = generate_scene(SceneSpec{}, 1);
    const GdContext ctx = make_context(scene, scene.trapezoid.image);
    const GdConfig cfg;
    VertexVector outside = ctx.initial;
    outside[0] += cfg.delta_max + 1.0;
    CHECK(std::isinf(objective(outside, ctx, cfg)));

    // Single-sample objective is just that point's error.
    GdContext one = ctx;
    one.samples.resize(1);
    VertexVector shifted = ctx.initial;
    shifted[1] += 2.0;
    const Homography H = compute_homography(unflatten(shifted), ctx.dst);
    const GroundPoint p = map_point(H, one.samples[0].pixel);
    CHECK(objective(shifted, one, cfg) ==
          doctest::Approx(std::hypot(p.x - one.samples[0].truth.x,
                                     p.y - one.samples[0].truth.y)).epsilon(1e-12));
}

TEST_CASE("coarse search never returns a worse point") {
    const Scene scene = generate_scene(SceneSpec{}, 1);
    PixelQuad start = scene.trapezoid.image;
    start[0].u += 2.0; // perturb the top-left corner by (+2, 0)
    const GdContext ctx = make_context(scene, start);
    GdConfig cfg;

    SUBCASE("trivial grid returns the start") {
        cfg.coarse_grid = {0.0};
        double best = objective(ctx.initial, ctx, cfg);
        const double before = best;
        long evals = 0;
        std::vector<TraceEntry> trace;
        const VertexVector out = coarse_search(ctx.initial, ctx, cfg, best, evals, trace);
        CHECK(out == ctx.initial);
        CHECK(best == before);
        CHECK(evals == 0);
    }

    SUBCASE("grid containing the inverse displacement improves strictly") {
        double best = objective(ctx.initial, ctx, cfg);
        const double before = best;
        long evals = 0;
        std::vector<TraceEntry> trace;
        const VertexVector out = coarse_search(ctx.initial, ctx, cfg, best, evals, trace);
        CHECK(best < before);
        CHECK(objective(out, ctx, cfg) == doctest::Approx(best));
    }
}

TEST_CASE("fine descent recovers a single planted coordinate shift") {
    // Short trapezoid so the planted shift leaves a well-conditioned
    // objective that the fine steps can descend without the coarse phase.
    SceneSpec sspec;
    sspec.trapezoid.far_y = 50.0;
    const Scene scene = generate_scene(sspec, 1);
    PixelQuad start = scene.trapezoid.image;
    start[1].v += 1.0;
    const GdContext ctx = make_context(scene, start);
    GdConfig cfg;
    cfg.seed = 5;

    double best = objective(ctx.initial, ctx, cfg);
    const double before = best;
    long evals = 0;
    std::vector<TraceEntry> trace;
    fine_descent(ctx.initial, ctx, cfg, best, evals, trace);
    CHECK(best < 0.15 * before); // at least 85% objective reduction
}

TEST_CASE("optimize is monotone, deterministic and budget-honest") {
    const Scene scene = generate_scene(SceneSpec{}, 1);
    const TrapezoidPair base = scene.trapezoid;
    PerturbationSpec pspec;
    pspec.n_variants = 5;
    const auto variants = generate_variants(base.image, base.ground, pspec, 31);

    for (const auto& var : variants) {
        GdContext ctx;
        ctx.dst = var.dst;
        ctx.samples = calibration_points(scene, {5.0, 25.0, 44.0});
        ctx.initial = flatten(var.src);
        GdConfig cfg;
        cfg.seed = 17;

        const GdResult a = optimize(ctx.initial, ctx, cfg);
        CHECK(a.final_objective <= a.initial_objective);
        CHECK(a.evaluations <= cfg.budget + 2 * 24); // fine budget + coarse sweep

        double prev = a.initial_objective;
        for (const auto& t : a.trace) {
            CHECK(t.objective < prev);
            prev = t.objective;
        }

        const GdResult b = optimize(ctx.initial, ctx, cfg);
        CHECK(a.final_objective == b.final_objective);
        CHECK(a.vertices == b.vertices);
        CHECK(a.trace.size() == b.trace.size());
    }
}

TEST_CASE("zero budget returns the start point") {
    const Scene scene = generate_scene(SceneSpec{}, 1);
    PixelQuad start = scene.trapezoid.image;
    start[0].u += 2.0;
    const GdContext ctx = make_context(scene, start);
    GdConfig cfg;
    cfg.budget = 0;
    const GdResult res = optimize(ctx.initial, ctx, cfg);
    CHECK(res.vertices == ctx.initial);
    CHECK(res.evaluations == 0);
    CHECK(res.trace.empty());
}

TEST_CASE("already optimal start stays put") {
    const Scene scene = generate_scene(SceneSpec{}, 1);
    const GdContext ctx = make_context(scene, scene.trapezoid.image);
    GdConfig cfg;
    cfg.seed = 9;
    const GdResult res = optimize(ctx.initial, ctx, cfg);
    CHECK(res.final_objective <= res.initial_objective);
    CHECK(res.final_objective < 1e-6);
}

TEST_CASE("invalid configurations are rejected") {
    const Scene scene = generate_scene(SceneSpec{}, 1);
    const GdContext ctx = make_context(scene, scene.trapezoid.image);
    GdConfig cfg;
    cfg.fine_steps = {1.0, 2.0}; // not decreasing
    CHECK_THROWS_AS(optimize(ctx.initial, ctx, cfg), OutOfRange);
    cfg = GdConfig{};
    cfg.delta_max = -1.0;
    CHECK_THROWS_AS(optimize(ctx.initial, ctx, cfg), OutOfRange);
}
