#include "holoq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "holoq/gauge.hpp"
#include "holoq/geometry.hpp"

namespace holoq {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 lerp(const Vec3& a, const Vec3& b, double s) {
    return {a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]), a[2] + s * (b[2] - a[2])};
}

Vec3 unit_axis(int axis) {
    Vec3 e{0.0, 0.0, 0.0};
    e.at(static_cast<std::size_t>(axis)) = 1.0;
    return e;
}

ParameterPath sample(std::function<Vec3(double)> curve, double total_time, std::size_t steps, bool closed) {
    if (!(total_time > 0.0) || steps == 0) throw std::invalid_argument("path: need total_time > 0 and steps >= 1");
    ParameterPath p;
    p.closed = closed;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = total_time * static_cast<double>(k) / static_cast<double>(steps);
        p.times.push_back(t);
        p.points.push_back(curve(t));
    }
    if (closed) p.points.back() = p.points.front();
    p.curve = std::move(curve);
    return p;
}

// Frames at every sample, band order carried over from the previous sample.
std::vector<BiorthFrame> tracked_frames(const Model& model, const ParameterPath& path, const FrameOptions& opts,
                                        bool require_real, double overlap_tol) {
    std::vector<BiorthFrame> out;
    out.reserve(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) {
        BiorthFrame f;
        try {
            f = frame_at(model, path.points[k], opts);
        } catch (const NumericalError& e) {
            throw NumericalError(e.code(), "sample " + std::to_string(k) + ": " + e.what(), path.points[k]);
        }
        if (require_real && !f.real_spectrum)
            throw NumericalError(ErrorCode::ComplexSpectrum,
                                 "adiabatic evolution needs a real spectrum; sample " + std::to_string(k) + " has complex energies",
                                 path.points[k]);
        if (!out.empty()) {
            f = follow(out.back(), f);
            for (std::size_t j = 0; j < f.dim(); ++j)
                if (edge_defect(out.back(), j, f, j) > overlap_tol)
                    throw NumericalError(ErrorCode::StepTooCoarse,
                                         "frames at samples " + std::to_string(k - 1) + " and " + std::to_string(k) +
                                             " differ too much for band tracking",
                                         path.points[k]);
        }
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace

ParameterPath ParameterPath::circle(const Vec3& centre, double radius, double total_time, std::size_t steps, int axis_a,
                                    int axis_b) {
    const Vec3 ea = unit_axis(axis_a);
    const Vec3 eb = unit_axis(axis_b);
    auto curve = [=](double t) {
        const double u = 2.0 * kPi * t / total_time;
        Vec3 r = centre;
        for (int i = 0; i < 3; ++i) r[i] += radius * (std::cos(u) * ea[i] + std::sin(u) * eb[i]);
        return r;
    };
    return sample(curve, total_time, steps, true);
}

ParameterPath ParameterPath::latitude(double theta, double radius, double total_time, std::size_t steps) {
    auto curve = [=](double t) {
        const double u = 2.0 * kPi * t / total_time;
        return Vec3{radius * std::sin(theta) * std::cos(u), radius * std::sin(theta) * std::sin(u), radius * std::cos(theta)};
    };
    return sample(curve, total_time, steps, true);
}

ParameterPath ParameterPath::line(const Vec3& from, const Vec3& to, double total_time, std::size_t steps) {
    return sample([=](double t) { return lerp(from, to, t / total_time); }, total_time, steps, false);
}

ParameterPath ParameterPath::constant(const Vec3& point, double total_time, std::size_t steps) {
    return sample([=](double) { return point; }, total_time, steps, true);
}

ParameterPath ParameterPath::there_and_back(const Vec3& from, const Vec3& to, double total_time, std::size_t steps) {
    auto curve = [=](double t) {
        const double s = 2.0 * t / total_time;
        return lerp(from, to, s <= 1.0 ? s : 2.0 - s);
    };
    return sample(curve, total_time, steps, true);
}

Vec3 ParameterPath::at(double t) const {
    if (curve) return curve(t);
    if (t <= times.front()) return points.front();
    if (t >= times.back()) return points.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - times.begin()) - 1;
    return lerp(points[k], points[k + 1], (t - times[k]) / (times[k + 1] - times[k]));
}

void ParameterPath::validate() const {
    if (times.size() < 2 || times.size() != points.size())
        throw std::invalid_argument("path: need at least two samples with one time per point");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) throw std::invalid_argument("path: times must increase strictly");
    if (closed) {
        const Vec3& a = points.front();
        const Vec3& b = points.back();
        if (std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]) > 1e-12)
            throw NumericalError(ErrorCode::NotClosed, "path marked closed but end point differs from start", b);
    }
}

CVector propagate_step(const BiorthFrame& frame, double dt, std::span<const cplx> psi) {
    if (psi.size() != frame.dim()) throw NumericalError(ErrorCode::DimensionMismatch, "propagate_step: state has wrong length");
    CVector y = frame.left.adjoint() * psi;
    for (std::size_t j = 0; j < y.size(); ++j) y[j] *= std::exp(-I_UNIT * frame.energies[j] * dt);
    return frame.right * y;
}

CVector propagate_step(const ComplexMatrix& h, double dt, std::span<const cplx> psi, const FrameOptions& opts) {
    if (!(dt > 0.0)) throw std::invalid_argument("propagate_step: dt must be positive");
    return propagate_step(build_frame(h, opts), dt, psi);
}

EvolutionRecord evolve_path(const Model& model, const ParameterPath& path, std::span<const cplx> psi0,
                            const EvolutionOptions& opts) {
    path.validate();
    const std::size_t n = model.dim();
    if (psi0.size() != n) throw NumericalError(ErrorCode::DimensionMismatch, "evolve_path: initial state has wrong length");
    const bool adiabatic = opts.mode == EvolutionMode::adiabatic;
    const auto frames = tracked_frames(model, path, opts.frame, adiabatic, opts.step_overlap_tol);

    EvolutionRecord rec;
    rec.times = path.times;
    rec.points = path.points;
    rec.closed = path.closed;

    CVector psi(psi0.begin(), psi0.end());
    CVector phase(n, 0.0);
    auto record = [&](std::size_t k) {
        const auto& f = frames[k];
        CVector proj(n);
        CVector coef(n);
        for (std::size_t j = 0; j < n; ++j) {
            proj[j] = inner(f.phi(j), psi);
            coef[j] = proj[j] * std::exp(I_UNIT * phase[j]);
        }
        rec.states.push_back(psi);
        rec.projections.push_back(proj);
        rec.coefficients.push_back(coef);
        const cplx pn = pseudo_norm_complex(f, psi);
        rec.pseudo_norm_complex.push_back(pn);
        rec.pseudo_norm_trace.push_back(pn.real());
    };

    record(0);
    if (opts.band) {
        if (*opts.band >= n) throw NumericalError(ErrorCode::DimensionMismatch, "evolve_path: band out of range");
        rec.band = *opts.band;
    } else {
        const auto& c = rec.coefficients.front();
        rec.band = static_cast<std::size_t>(
            std::max_element(c.begin(), c.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); }) - c.begin());
    }

    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const double dt = path.times[k + 1] - path.times[k];
        const Vec3 mid = path.at(0.5 * (path.times[k] + path.times[k + 1]));
        auto fm = follow(frames[k], frame_at(model, mid, opts.frame));
        if (adiabatic && !fm.real_spectrum)
            throw NumericalError(ErrorCode::ComplexSpectrum, "adiabatic evolution: complex spectrum between samples " +
                                                                 std::to_string(k) + " and " + std::to_string(k + 1),
                                 mid);
        psi = propagate_step(fm, dt, psi);
        for (std::size_t j = 0; j < n; ++j) phase[j] += fm.energies[j] * dt;
        record(k + 1);
    }
    rec.dynamical_phase = phase[rec.band];

    for (const auto& c : rec.coefficients) {
        const double ref = std::abs(c[rec.band]);
        double worst = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != rec.band) worst = std::max(worst, ref > 0.0 ? std::abs(c[j]) / ref : INFINITY);
        rec.leakage_trace.push_back(worst);
        rec.leakage = std::max(rec.leakage, worst);
    }
    return rec;
}

double adiabaticity_margin(const Model& model, const ParameterPath& path, std::size_t band, const FrameOptions& opts) {
    path.validate();
    if (band >= model.dim()) throw NumericalError(ErrorCode::DimensionMismatch, "adiabaticity_margin: band out of range");
    std::vector<BiorthFrame> frames;
    try {
        frames = tracked_frames(model, path, opts, true, 0.5);
    } catch (const NumericalError& e) {
        if (e.code() == ErrorCode::NearDefective) throw NumericalError(ErrorCode::Degenerate, e.what(), e.where());
        throw;
    }
    const std::size_t last = path.size() - 1;
    double margin = 0.0;
    for (std::size_t k = 0; k <= last; ++k) {
        if (path.closed && k == last) break;
        std::size_t prev = k == 0 ? (path.closed ? last - 1 : 0) : k - 1;
        std::size_t next = k == last ? last : k + 1;
        double span = 0.0;
        if (k == 0 && path.closed)
            span = (path.times[1] - path.times[0]) + (path.times[last] - path.times[last - 1]);
        else
            span = path.times[next] - path.times[prev];
        const auto& centre = frames[k];
        const auto pivots = anchor_pivots(centre);
        const auto c = fix_gauge(centre, FrameGauge::balanced, pivots);
        const auto fp = fix_gauge(follow(centre, frames[next]), FrameGauge::balanced, pivots);
        const auto fm = fix_gauge(follow(centre, frames[prev]), FrameGauge::balanced, pivots);
        const auto phi_m = c.phi(band);
        for (std::size_t j = 0; j < c.dim(); ++j) {
            if (j == band) continue;
            const auto dpsi = scaled(subtract(fp.psi(j), fm.psi(j)), 1.0 / span);
            const cplx gap = c.energies[band] - c.energies[j];
            margin = std::max(margin, std::abs(inner(phi_m, dpsi) / gap));
        }
    }
    return margin;
}

GeometricPhase extract_geometric_phase(const EvolutionRecord& record, std::optional<std::size_t> band, double leakage_threshold) {
    if (!record.closed) throw NumericalError(ErrorCode::NotClosed, "geometric phase needs a closed path");
    if (record.coefficients.size() < 2) throw NumericalError(ErrorCode::NotClosed, "record has fewer than two samples");
    const std::size_t m = band.value_or(record.band);
    if (m >= record.coefficients.front().size()) throw NumericalError(ErrorCode::DimensionMismatch, "band out of range");
    if (record.leakage > leakage_threshold)
        throw NumericalError(ErrorCode::LeakageTooLarge,
                             "leakage " + std::to_string(record.leakage) + " exceeds " + std::to_string(leakage_threshold));
    cplx sum{};
    for (std::size_t k = 0; k + 1 < record.coefficients.size(); ++k) {
        const cplx a = record.coefficients[k][m];
        const cplx b = record.coefficients[k + 1][m];
        if (a == cplx{}) throw NumericalError(ErrorCode::LeakageTooLarge, "tracked amplitude vanished", record.points[k]);
        sum += std::log(b / a);
    }
    GeometricPhase g;
    g.unwound = -I_UNIT * sum;
    const double w = std::ceil((g.unwound.real() - kPi) / (2.0 * kPi));
    g.winding = static_cast<long>(w);
    g.beta = {g.unwound.real() - 2.0 * kPi * w, g.unwound.imag()};
    return g;
}

}  // namespace holoq
