#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "holoq/biorthogonal.hpp"
#include "holoq/models.hpp"

namespace holoq {

// How a frame's free GL(1,C) factors are fixed.
//   canonical: unit |psi|, first non-negligible component real positive (build_frame output)
//   anchored:  unit |psi|, component `pivot` real positive
//   balanced:  |psi| = |phi|, component `pivot` real positive
// The pivots come from a reference frame so neighbouring frames share them,
// which keeps the gauge smooth where the canonical pivot would jump.
enum class FrameGauge { canonical, anchored, balanced };

// Index of the largest |psi_j| component, per band.
std::vector<std::size_t> anchor_pivots(const BiorthFrame& frame);

BiorthFrame fix_gauge(const BiorthFrame& frame, FrameGauge gauge, std::span<const std::size_t> pivots);

// Band j of the result is band perm[j] of the input.
BiorthFrame permute_bands(const BiorthFrame& frame, std::span<const std::size_t> perm);

// Reorders `next` so that its band j continues band j of `ref`.
BiorthFrame follow(const BiorthFrame& ref, const BiorthFrame& next);

// Frame at r with bands matched to `centre` and gauge fixed on the centre's pivots.
BiorthFrame local_frame(const Model& model, const Vec3& r, const BiorthFrame& centre, FrameGauge gauge,
                        std::span<const std::size_t> pivots, const FrameOptions& opts = {});

/// Per-vertex nonzero factors f_k: psi -> f psi, phi -> phi / conj(f).
struct GaugeAssignment {
    std::vector<cplx> factors;

    // |f| uniform in [min_modulus, max_modulus], phase uniform in [0, 2 pi).
    static GaugeAssignment random(std::size_t count, std::uint64_t seed, double min_modulus = 0.5, double max_modulus = 2.0);
    static GaugeAssignment constant(std::size_t count, cplx f);
};

// Regauges one band of one frame.
BiorthFrame regauge_band(const BiorthFrame& frame, std::size_t band, cplx factor);

}  // namespace holoq
