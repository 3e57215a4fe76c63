#include "holoq/gauge.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace holoq {

std::vector<std::size_t> anchor_pivots(const BiorthFrame& frame) {
    std::vector<std::size_t> pivots(frame.dim(), 0);
    for (std::size_t j = 0; j < frame.dim(); ++j) {
        double best = -1.0;
        for (std::size_t i = 0; i < frame.dim(); ++i) {
            const double m = std::abs(frame.right(i, j));
            if (m > best * (1.0 + 1e-12)) {
                best = m;
                pivots[j] = i;
            }
        }
    }
    return pivots;
}

BiorthFrame fix_gauge(const BiorthFrame& frame, FrameGauge gauge, std::span<const std::size_t> pivots) {
    if (gauge == FrameGauge::canonical) return frame;
    if (pivots.size() != frame.dim()) throw NumericalError(ErrorCode::DimensionMismatch, "fix_gauge: one pivot per band required");
    CVector factors(frame.dim());
    for (std::size_t j = 0; j < frame.dim(); ++j) {
        const auto psi = frame.psi(j);
        const cplx p = psi[pivots[j]];
        if (p == cplx{}) throw NumericalError(ErrorCode::ZeroFactor, "fix_gauge: pivot component vanishes");
        double scale = 1.0 / norm2(psi);
        if (gauge == FrameGauge::balanced) scale = std::sqrt(norm2(frame.phi(j)) / norm2(psi));
        factors[j] = scale * std::conj(p) / std::abs(p);
    }
    auto out = regauge(frame, factors);
    for (std::size_t j = 0; j < frame.dim(); ++j) out.right(pivots[j], j).imag(0.0);
    return out;
}

BiorthFrame permute_bands(const BiorthFrame& frame, std::span<const std::size_t> perm) {
    BiorthFrame out = frame;
    for (std::size_t j = 0; j < frame.dim(); ++j) {
        out.energies[j] = frame.energies[perm[j]];
        out.right.set_column(j, frame.right.column(perm[j]));
        out.left.set_column(j, frame.left.column(perm[j]));
    }
    return out;
}

BiorthFrame follow(const BiorthFrame& ref, const BiorthFrame& next) {
    const auto perm = match_bands(ref, next);
    for (std::size_t j = 0; j < perm.size(); ++j)
        if (perm[j] != j) return permute_bands(next, perm);
    return next;
}

BiorthFrame local_frame(const Model& model, const Vec3& r, const BiorthFrame& centre, FrameGauge gauge,
                        std::span<const std::size_t> pivots, const FrameOptions& opts) {
    return fix_gauge(follow(centre, frame_at(model, r, opts)), gauge, pivots);
}

GaugeAssignment GaugeAssignment::random(std::size_t count, std::uint64_t seed, double min_modulus, double max_modulus) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> modulus(min_modulus, max_modulus);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    GaugeAssignment g;
    g.factors.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double m = modulus(rng);
        g.factors.push_back(std::polar(m, phase(rng)));
    }
    return g;
}

GaugeAssignment GaugeAssignment::constant(std::size_t count, cplx f) { return {std::vector<cplx>(count, f)}; }

BiorthFrame regauge_band(const BiorthFrame& frame, std::size_t band, cplx factor) {
    CVector factors(frame.dim(), 1.0);
    factors.at(band) = factor;
    return regauge(frame, factors);
}

}  // namespace holoq
