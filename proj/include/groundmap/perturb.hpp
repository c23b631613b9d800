#pragma once

#include <cstdint>
#include <vector>

#include "groundmap/geometry.hpp"

namespace groundmap {

enum class PerturbSides { image_only, both };

struct PerturbationSpec {
    std::vector<double> magnitudes = {0.0, 1.0, 2.0, 3.0}; // px
    int min_coords = 2;
    int max_coords = 16;
    PerturbSides sides = PerturbSides::both;
    int n_variants = 1000;
    /// Map-side clicks happen on a rendered site map; shifts there are in
    /// map display pixels and convert to meters at this scale.
    double map_m_per_px = 0.1;

    int total_coords() const { return sides == PerturbSides::both ? 16 : 8; }
    bool valid() const;
};

/// One applied coordinate shift: quad 0 = image side, 1 = map side;
/// axis 0 = u/x, 1 = v/y; shift is signed, in (display) pixels.
struct AppliedShift {
    int quad = 0;
    int vertex = 0;
    int axis = 0;
    double shift_px = 0.0;
};

struct TrapezoidVariant {
    int id = 0;
    PixelQuad src;
    GroundQuad dst;
    std::vector<AppliedShift> applied;
};

/// Variant i depends only on (seed, i); generation order is irrelevant.
/// Degenerate draws are resampled up to 100 times, then
/// DegenerateAfterRetries is thrown.
TrapezoidVariant make_variant(const PixelQuad& base_src, const GroundQuad& base_dst,
                              const PerturbationSpec& spec, std::uint64_t seed, int id);

std::vector<TrapezoidVariant> generate_variants(const PixelQuad& base_src,
                                                const GroundQuad& base_dst,
                                                const PerturbationSpec& spec,
                                                std::uint64_t seed);

} // namespace groundmap
