#include "groundmap/perturb.hpp"

#include <algorithm>
#include <numeric>

#include "groundmap/rng.hpp"

namespace groundmap {

bool PerturbationSpec::valid() const {
    if (magnitudes.empty() || n_variants < 0 || map_m_per_px <= 0.0)
        return false;
    for (double m : magnitudes)
        if (m < 0.0)
            return false;
    return 1 <= min_coords && min_coords <= max_coords && max_coords <= total_coords();
}

TrapezoidVariant make_variant(const PixelQuad& base_src, const GroundQuad& base_dst,
                              const PerturbationSpec& spec, std::uint64_t seed, int id) {
    if (!spec.valid())
        throw OutOfRange("invalid perturbation spec");
    auto rng = make_engine(mix_seed(seed, 0x706572ULL, static_cast<std::uint64_t>(id)));

    std::uniform_int_distribution<int> count_dist(spec.min_coords, spec.max_coords);
    std::uniform_int_distribution<std::size_t> mag_dist(0, spec.magnitudes.size() - 1);
    std::uniform_int_distribution<int> sign_dist(0, 1);

    const int total = spec.total_coords();
    std::vector<int> indices(static_cast<std::size_t>(total));

    for (int attempt = 0; attempt < 100; ++attempt) {
        TrapezoidVariant var;
        var.id = id;
        var.src = base_src;
        var.dst = base_dst;

        const int k = count_dist(rng);
        std::iota(indices.begin(), indices.end(), 0);
        std::shuffle(indices.begin(), indices.end(), rng);
        for (int j = 0; j < k; ++j) {
            const int idx = indices[static_cast<std::size_t>(j)];
            AppliedShift s;
            s.quad = idx / 8;
            s.vertex = (idx % 8) / 2;
            s.axis = idx % 2;
            const double mag = spec.magnitudes[mag_dist(rng)];
            s.shift_px = sign_dist(rng) == 0 ? mag : -mag;
            if (s.quad == 0) {
                auto& p = var.src[static_cast<std::size_t>(s.vertex)];
                set_coord(p, s.axis, coord(p, s.axis) + s.shift_px);
            } else {
                auto& p = var.dst[static_cast<std::size_t>(s.vertex)];
                set_coord(p, s.axis, coord(p, s.axis) + s.shift_px * spec.map_m_per_px);
            }
            var.applied.push_back(s);
        }

        if (!quad_valid(var.src) || !quad_valid(var.dst))
            continue;
        try {
            (void)compute_homography(var.src, var.dst);
        } catch (const Error&) {
            continue;
        }
        return var;
    }
    throw DegenerateAfterRetries("perturbation kept producing degenerate quads");
}

std::vector<TrapezoidVariant> generate_variants(const PixelQuad& base_src,
                                                const GroundQuad& base_dst,
                                                const PerturbationSpec& spec,
                                                std::uint64_t seed) {
    std::vector<TrapezoidVariant> out;
    out.reserve(static_cast<std::size_t>(spec.n_variants));
    for (int i = 0; i < spec.n_variants; ++i)
        out.push_back(make_variant(base_src, base_dst, spec, seed, i));
    return out;
}

} // namespace groundmap
