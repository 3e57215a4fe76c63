#include "holoq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

namespace holoq {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 add(const Vec3& a, const Vec3& b, double s = 1.0) { return {a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]}; }

Vec3 unit_axis(int axis) {
    Vec3 e{0.0, 0.0, 0.0};
    e.at(static_cast<std::size_t>(axis)) = 1.0;
    return e;
}

double length(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

// Splits Re(beta) into (-pi, pi] plus a multiple of 2 pi.
std::pair<cplx, long> reduce_phase(cplx beta) {
    const double w = std::ceil((beta.real() - kPi) / (2.0 * kPi));
    return {cplx{beta.real() - 2.0 * kPi * w, beta.imag()}, static_cast<long>(w)};
}

void require_band(const Model& model, std::size_t band) {
    if (band >= model.dim())
        throw NumericalError(ErrorCode::DimensionMismatch,
                             "band " + std::to_string(band) + " out of range for dimension " + std::to_string(model.dim()));
}

void require_step(double h, const Vec3& r) {
    if (!(h > 0.0) || h < 1e-7 * std::max(1.0, length(r)))
        throw NumericalError(ErrorCode::StepDegenerate, "step " + std::to_string(h) + " too small for finite differences", r);
}

std::size_t walk_edge(const Model& model, const Vec3& a, const BiorthFrame& fa, std::size_t ba, const Vec3& c,
                      const BiorthFrame& fc, int depth, const GeometryOptions& opts, LoopFrames& out) {
    const std::size_t bc = match_bands(fa, fc)[ba];
    if (edge_defect(fa, ba, fc, bc) <= opts.edge_tol) return bc;
    if (depth >= opts.max_refine_depth)
        throw NumericalError(ErrorCode::EdgeTooLong, "loop edge still too long after refinement", a);
    const Vec3 mid{0.5 * (a[0] + c[0]), 0.5 * (a[1] + c[1]), 0.5 * (a[2] + c[2])};
    const auto fm = frame_at(model, mid, opts.frame);
    const std::size_t bm = walk_edge(model, a, fa, ba, mid, fm, depth + 1, opts, out);
    out.points.push_back(mid);
    out.frames.push_back(fm);
    out.bands.push_back(bm);
    return walk_edge(model, mid, fm, bm, c, fc, depth + 1, opts, out);
}

}  // namespace

ParameterLoop ParameterLoop::circle(const Vec3& centre, double radius, std::size_t k, int axis_a, int axis_b) {
    ParameterLoop loop;
    const Vec3 ea = unit_axis(axis_a);
    const Vec3 eb = unit_axis(axis_b);
    for (std::size_t i = 0; i < k; ++i) {
        const double u = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(k);
        loop.vertices.push_back(add(add(centre, ea, radius * std::cos(u)), eb, radius * std::sin(u)));
    }
    loop.vertices.push_back(loop.vertices.front());
    return loop;
}

ParameterLoop ParameterLoop::latitude(double theta, double radius, std::size_t k) {
    ParameterLoop loop;
    const double rho = radius * std::sin(theta);
    const double z = radius * std::cos(theta);
    for (std::size_t i = 0; i < k; ++i) {
        const double u = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(k);
        loop.vertices.push_back({rho * std::cos(u), rho * std::sin(u), z});
    }
    loop.vertices.push_back(loop.vertices.front());
    return loop;
}

ParameterLoop ParameterLoop::degenerate(const Vec3& point, std::size_t k) {
    return ParameterLoop{std::vector<Vec3>(k + 1, point)};
}

void ParameterLoop::validate() const {
    if (vertices.size() < 4) throw NumericalError(ErrorCode::NotClosed, "loop needs at least 3 edges");
    const Vec3& a = vertices.front();
    const Vec3& b = vertices.back();
    if (length(add(a, b, -1.0)) > 1e-12) throw NumericalError(ErrorCode::NotClosed, "loop end point differs from start", b);
}

cplx edge_increment(const BiorthFrame& a, std::size_t band_a, const BiorthFrame& b, std::size_t band_b) {
    const cplx z1 = inner(a.phi(band_a), b.psi(band_b));
    const cplx z2 = inner(b.phi(band_b), a.psi(band_a));
    if (z1 == cplx{} || z2 == cplx{}) throw NumericalError(ErrorCode::EdgeTooLong, "edge overlap vanishes");
    return std::log(z1) - 0.5 * std::log(z1 * z2);
}

double edge_defect(const BiorthFrame& a, std::size_t band_a, const BiorthFrame& b, std::size_t band_b) {
    const cplx z1 = inner(a.phi(band_a), b.psi(band_b));
    const cplx z2 = inner(b.phi(band_b), a.psi(band_a));
    return std::abs(z1 * z2 - 1.0);
}

LoopFrames loop_frames(const Model& model, const ParameterLoop& loop, std::size_t band, const GeometryOptions& opts) {
    loop.validate();
    require_band(model, band);
    const std::size_t k = loop.edges();
    auto frames = map_indexed(
        k, [&](std::size_t i) { return frame_at(model, loop.vertices[i], opts.frame); }, opts.parallel);

    LoopFrames out;
    out.points.push_back(loop.vertices[0]);
    out.frames.push_back(frames[0]);
    out.bands.push_back(band);
    std::size_t current = band;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t next = (i + 1) % k;
        out.edge_starts.push_back(out.points.size() - 1);
        const BiorthFrame start = out.frames.back();
        const std::size_t reached =
            walk_edge(model, loop.vertices[i], start, current, loop.vertices[i + 1], frames[next], 0, opts, out);
        if (next == 0) {
            if (reached != band)
                throw NumericalError(ErrorCode::BandExchange, "band does not return to itself around the loop (EP encircled)",
                                     loop.vertices[0]);
        } else {
            out.points.push_back(loop.vertices[next]);
            out.frames.push_back(frames[next]);
            out.bands.push_back(reached);
        }
        current = reached;
    }
    return out;
}

HolonomyResult holonomy_from_frames(const LoopFrames& lf) {
    const std::size_t n = lf.frames.size();
    if (n == 0 || lf.bands.size() != n) throw NumericalError(ErrorCode::DimensionMismatch, "holonomy: empty or inconsistent frame list");
    std::vector<cplx> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        raw[i] = I_UNIT * edge_increment(lf.frames[i], lf.bands[i], lf.frames[j], lf.bands[j]);
    }
    std::vector<std::size_t> starts = lf.edge_starts;
    if (starts.empty()) {
        starts.resize(n);
        for (std::size_t i = 0; i < n; ++i) starts[i] = i;
    }
    HolonomyResult res;
    res.band = lf.bands.front();
    cplx total{};
    for (std::size_t e = 0; e < starts.size(); ++e) {
        const std::size_t end = e + 1 < starts.size() ? starts[e + 1] : n;
        cplx sum{};
        for (std::size_t i = starts[e]; i < end; ++i) sum += raw[i];
        res.increments.push_back(sum);
        total += sum;
    }
    std::tie(res.beta, res.winding) = reduce_phase(total);
    return res;
}

LoopFrames apply_gauge(const LoopFrames& frames, const GaugeAssignment& gauge) {
    if (gauge.factors.size() != frames.frames.size())
        throw NumericalError(ErrorCode::DimensionMismatch, "apply_gauge: one factor per vertex required");
    LoopFrames out = frames;
    for (std::size_t k = 0; k < out.frames.size(); ++k)
        out.frames[k] = regauge_band(frames.frames[k], frames.bands[k], gauge.factors[k]);
    return out;
}

HolonomyResult holonomy_discrete(const Model& model, const ParameterLoop& loop, std::size_t band, const GeometryOptions& opts) {
    const auto lf = loop_frames(model, loop, band, opts);
    auto res = holonomy_from_frames(lf);
    for (int t = 0; t < opts.gauge_trials; ++t) {
        const auto g = GaugeAssignment::random(lf.frames.size(), opts.seed + static_cast<std::uint64_t>(t));
        const auto other = holonomy_from_frames(apply_gauge(lf, g));
        const auto [delta, w] = reduce_phase(other.beta - res.beta);
        res.gauge_checksum = std::max(res.gauge_checksum, std::abs(delta));
    }
    return res;
}

namespace {

struct Stencil {
    BiorthFrame centre;
    std::vector<std::size_t> pivots;
    Vec3 direction;
};

Stencil make_stencil(const Model& model, const Vec3& r, const Vec3& direction, std::size_t band, const GeometryOptions& opts) {
    require_band(model, band);
    const double len = length(direction);
    if (!(len > 0.0)) throw NumericalError(ErrorCode::DimensionMismatch, "direction must be nonzero", r);
    Stencil s;
    s.centre = frame_at(model, r, opts.frame);
    s.pivots = anchor_pivots(s.centre);
    s.direction = {direction[0] / len, direction[1] / len, direction[2] / len};
    return s;
}

CVector psi_derivative(const Model& model, const Vec3& r, const Stencil& s, double h, std::size_t band, FrameGauge gauge,
                       const GeometryOptions& opts) {
    const auto plus = local_frame(model, add(r, s.direction, h), s.centre, gauge, s.pivots, opts.frame);
    const auto minus = local_frame(model, add(r, s.direction, -h), s.centre, gauge, s.pivots, opts.frame);
    return scaled(subtract(plus.psi(band), minus.psi(band)), 1.0 / (2.0 * h));
}

}  // namespace

cplx connection_fd(const Model& model, const Vec3& r, const Vec3& direction, double h, std::size_t band, FrameGauge gauge,
                   const GeometryOptions& opts) {
    require_step(h, r);
    const auto s = make_stencil(model, r, direction, band, opts);
    const auto c = fix_gauge(s.centre, gauge, s.pivots);
    const auto phi = c.phi(band);
    const cplx a = I_UNIT * inner(phi, psi_derivative(model, r, s, h, band, gauge, opts));
    // Below ~1e-5 the difference quotient is dominated by rounding; confirm with h/2.
    if (h < 1e-5 * std::max(1.0, length(r))) {
        const cplx a2 = I_UNIT * inner(phi, psi_derivative(model, r, s, 0.5 * h, band, gauge, opts));
        if (std::abs(a - a2) > 1e-6 * (1.0 + std::abs(a)))
            throw NumericalError(ErrorCode::StepDegenerate, "connection: Richardson check disagrees, step too small", r);
    }
    return a;
}

cplx connection_y_form(const Model& model, const Vec3& r, const Vec3& direction, double h, std::size_t band,
                       const ComplexMatrix& y, int alpha, const GeometryOptions& opts) {
    require_step(h, r);
    if (y.rows() != model.dim()) throw NumericalError(ErrorCode::DimensionMismatch, "connection_y_form: Y has wrong size", r);
    const auto s = make_stencil(model, r, direction, band, opts);
    const auto c = fix_gauge(s.centre, FrameGauge::balanced, s.pivots);
    const auto dpsi = psi_derivative(model, r, s, h, band, FrameGauge::balanced, opts);
    return I_UNIT * static_cast<double>(alpha) * inner(c.psi(band), y * dpsi);
}

cplx connection_loop_increment(const Model& model, const Vec3& r, const Vec3& direction, double h, std::size_t band,
                               const GeometryOptions& opts) {
    require_step(h, r);
    const auto s = make_stencil(model, r, direction, band, opts);
    const auto a = local_frame(model, add(r, s.direction, -0.5 * h), s.centre, FrameGauge::balanced, s.pivots, opts.frame);
    const auto b = local_frame(model, add(r, s.direction, 0.5 * h), s.centre, FrameGauge::balanced, s.pivots, opts.frame);
    return I_UNIT * edge_increment(a, band, b, band) / h;
}

cplx curvature_plaquette(const Model& model, const Vec3& r, int axis_a, int axis_b, double h, std::size_t band,
                         const GeometryOptions& opts) {
    require_band(model, band);
    if (axis_a == axis_b || axis_a < 0 || axis_a > 2 || axis_b < 0 || axis_b > 2)
        throw NumericalError(ErrorCode::DimensionMismatch, "curvature_plaquette: need two distinct axes in 0..2", r);
    if (!(h > 0.0) || h < 1e-5 * std::max(1.0, length(r)))
        throw NumericalError(ErrorCode::StepDegenerate, "plaquette side too small: flux below rounding", r);
    const Vec3 ea = unit_axis(axis_a);
    const Vec3 eb = unit_axis(axis_b);
    const double q = 0.5 * h;
    const std::array<Vec3, 4> corners{add(add(r, ea, -q), eb, -q), add(add(r, ea, q), eb, -q), add(add(r, ea, q), eb, q),
                                      add(add(r, ea, -q), eb, q)};
    const auto centre = frame_at(model, r, opts.frame);
    std::array<BiorthFrame, 4> f;
    for (std::size_t k = 0; k < 4; ++k) f[k] = follow(centre, frame_at(model, corners[k], opts.frame));
    cplx sum{};
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& a = f[k];
        const auto& b = f[(k + 1) % 4];
        if (edge_defect(a, band, b, band) > opts.edge_tol)
            throw NumericalError(ErrorCode::EdgeTooLong, "plaquette edge too long for a principal log", corners[k]);
        sum += edge_increment(a, band, b, band);
    }
    return I_UNIT * sum / (h * h);
}

std::array<cplx, 3> curvature_vector(const Model& model, const Vec3& r, double h, std::size_t band, const GeometryOptions& opts) {
    return {curvature_plaquette(model, r, 1, 2, h, band, opts), curvature_plaquette(model, r, 2, 0, h, band, opts),
            curvature_plaquette(model, r, 0, 1, h, band, opts)};
}

TriangulatedSurface TriangulatedSurface::cube(const Vec3& centre, double side, std::size_t n) {
    TriangulatedSurface s;
    s.closed = true;
    n = std::max<std::size_t>(n, 1);
    // (normal, u, v) with u x v = normal.
    const std::array<std::array<int, 3>, 3> frames{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}};
    const double half = 0.5 * side;
    for (const auto& [an, au, av] : frames) {
        for (double sign : {1.0, -1.0}) {
            // Flipping the normal swaps u and v to keep the winding outward.
            const int u = sign > 0 ? au : av;
            const int v = sign > 0 ? av : au;
            const std::size_t base = s.vertices.size();
            for (std::size_t i = 0; i <= n; ++i)
                for (std::size_t j = 0; j <= n; ++j) {
                    Vec3 p = centre;
                    p[an] += sign * half;
                    p[u] += -half + side * static_cast<double>(i) / static_cast<double>(n);
                    p[v] += -half + side * static_cast<double>(j) / static_cast<double>(n);
                    s.vertices.push_back(p);
                }
            auto idx = [&](std::size_t i, std::size_t j) { return base + i * (n + 1) + j; };
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    s.triangles.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
                    s.triangles.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
                }
        }
    }
    return s;
}

namespace {

// Pole plus rings at theta_i = theta_max * i / n_theta, i = 1..n_theta.
TriangulatedSurface polar_mesh(const Vec3& centre, double radius, double theta_max, std::size_t n_theta, std::size_t n_phi,
                               bool close_bottom) {
    TriangulatedSurface s;
    n_theta = std::max<std::size_t>(n_theta, 2);
    n_phi = std::max<std::size_t>(n_phi, 3);
    s.vertices.push_back(add(centre, Vec3{0.0, 0.0, radius}));
    const std::size_t rings = close_bottom ? n_theta - 1 : n_theta;
    for (std::size_t i = 1; i <= rings; ++i) {
        const double theta = theta_max * static_cast<double>(i) / static_cast<double>(n_theta);
        for (std::size_t k = 0; k < n_phi; ++k) {
            const double phi = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n_phi);
            s.vertices.push_back(add(centre, Vec3{radius * std::sin(theta) * std::cos(phi),
                                                  radius * std::sin(theta) * std::sin(phi), radius * std::cos(theta)}));
        }
    }
    auto ring = [&](std::size_t i, std::size_t k) { return 1 + (i - 1) * n_phi + k % n_phi; };
    for (std::size_t k = 0; k < n_phi; ++k) s.triangles.push_back({0, ring(1, k), ring(1, k + 1)});
    for (std::size_t i = 1; i < rings; ++i)
        for (std::size_t k = 0; k < n_phi; ++k) {
            s.triangles.push_back({ring(i, k), ring(i + 1, k), ring(i + 1, k + 1)});
            s.triangles.push_back({ring(i, k), ring(i + 1, k + 1), ring(i, k + 1)});
        }
    if (close_bottom) {
        const std::size_t bottom = s.vertices.size();
        s.vertices.push_back(add(centre, Vec3{0.0, 0.0, -radius}));
        for (std::size_t k = 0; k < n_phi; ++k) s.triangles.push_back({ring(rings, k), bottom, ring(rings, k + 1)});
        s.closed = true;
    }
    return s;
}

}  // namespace

TriangulatedSurface TriangulatedSurface::sphere(const Vec3& centre, double radius, std::size_t n_theta, std::size_t n_phi) {
    return polar_mesh(centre, radius, kPi, n_theta, n_phi, true);
}

TriangulatedSurface TriangulatedSurface::cap(const Vec3& centre, double radius, double theta_max, std::size_t n_theta,
                                             std::size_t n_phi) {
    return polar_mesh(centre, radius, theta_max, n_theta, n_phi, false);
}

FluxResult flux_surface(const Model& model, const TriangulatedSurface& surface, std::size_t band, const GeometryOptions& opts) {
    require_band(model, band);
    auto frames = map_indexed(
        surface.vertices.size(),
        [&](std::size_t i) {
            const Vec3& v = surface.vertices[i];
            try {
                return frame_at(model, v, opts.frame);
            } catch (const NumericalError& e) {
                if (e.code() == ErrorCode::NearDefective || e.code() == ErrorCode::NonDiagonalizable)
                    throw NumericalError(ErrorCode::SurfaceTouchesEP, std::string("surface vertex too close to an EP: ") + e.what(), v);
                throw;
            }
        },
        opts.parallel);

    // Carry the band label across the mesh by continuity: the index order of
    // the frames (by real part of E) can flip on a smooth surface.
    std::vector<std::vector<std::size_t>> neighbours(surface.vertices.size());
    for (const auto& tri : surface.triangles)
        for (std::size_t k = 0; k < 3; ++k) {
            neighbours[tri[k]].push_back(tri[(k + 1) % 3]);
            neighbours[tri[(k + 1) % 3]].push_back(tri[k]);
        }
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> label(surface.vertices.size(), unset);
    for (std::size_t root = 0; root < label.size(); ++root) {
        if (label[root] != unset) continue;
        label[root] = band;
        std::deque<std::size_t> queue{root};
        while (!queue.empty()) {
            const std::size_t v = queue.front();
            queue.pop_front();
            for (std::size_t w : neighbours[v]) {
                if (label[w] != unset) continue;
                label[w] = match_bands(frames[v], frames[w])[label[v]];
                queue.push_back(w);
            }
        }
    }

    auto per_triangle = map_indexed(
        surface.triangles.size(),
        [&](std::size_t t) {
            const auto& tri = surface.triangles[t];
            cplx sum{};
            for (std::size_t k = 0; k < 3; ++k) {
                const std::size_t ia = tri[k];
                const std::size_t ib = tri[(k + 1) % 3];
                const auto& a = frames[ia];
                const auto& b = frames[ib];
                if (match_bands(a, b)[label[ia]] != label[ib])
                    throw NumericalError(ErrorCode::BandExchange, "band labels disagree around a surface triangle (EP encircled)",
                                         surface.vertices[ib]);
                if (edge_defect(a, label[ia], b, label[ib]) > opts.edge_tol)
                    throw NumericalError(ErrorCode::EdgeTooLong, "surface edge too long; refine the mesh", surface.vertices[ia]);
                sum += edge_increment(a, label[ia], b, label[ib]);
            }
            return reduce_phase(I_UNIT * sum);
        },
        opts.parallel);

    FluxResult res;
    res.triangles = per_triangle.size();
    for (const auto& [beta, w] : per_triangle) {
        res.flux += beta;
        res.winding += w;
    }
    return res;
}

AuxiliaryCheck auxiliary_operator_check(const Model& model, const Vec3& r, double h, const GeometryOptions& opts) {
    require_step(h, r);
    const auto centre = frame_at(model, r, opts.frame);
    const auto pivots = anchor_pivots(centre);
    const std::size_t n = model.dim();
    auto frame = [&](const Vec3& p) { return local_frame(model, p, centre, FrameGauge::anchored, pivots, opts.frame); };

    using Triple = std::array<ComplexMatrix, 3>;
    auto f_at = [&](const Vec3& p) {
        const auto here = frame(p);
        Triple f{ComplexMatrix(n), ComplexMatrix(n), ComplexMatrix(n)};
        for (int a = 0; a < 3; ++a) {
            const auto plus = frame(add(p, unit_axis(a), h));
            const auto minus = frame(add(p, unit_axis(a), -h));
            for (std::size_t m = 0; m < n; ++m) {
                const auto d = scaled(subtract(plus.psi(m), minus.psi(m)), -I_UNIT / (2.0 * h));
                const auto phi = here.phi(m);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j) f[a](i, j) += d[i] * std::conj(phi[j]);
            }
        }
        return f;
    };

    const Triple f0 = f_at(r);
    std::array<Triple, 3> fp;
    std::array<Triple, 3> fm;
    for (int b = 0; b < 3; ++b) {
        fp[b] = f_at(add(r, unit_axis(b), h));
        fm[b] = f_at(add(r, unit_axis(b), -h));
    }
    auto d = [&](int b, int c) { return (1.0 / (2.0 * h)) * (fp[b][c] - fm[b][c]); };

    AuxiliaryCheck out;
    for (int c = 0; c < 3; ++c) {
        const int a = (c + 1) % 3;
        const int b = (c + 2) % 3;
        const auto curl = d(a, b) - d(b, a);
        const auto cross = f0[a] * f0[b] - f0[b] * f0[a];
        out.residual = std::max(out.residual, (curl - I_UNIT * cross).frobenius_norm());
        out.opposite_sign_residual = std::max(out.opposite_sign_residual, (curl + I_UNIT * cross).frobenius_norm());
    }
    return out;
}

std::array<cplx, 3> real_phase_components(const Model& model, const Vec3& r, std::size_t band, double h,
                                          const GeometryOptions& opts) {
    require_band(model, band);
    require_step(h, r);
    const auto centre = frame_at(model, r, opts.frame);
    if (!centre.real_spectrum) throw NumericalError(ErrorCode::ComplexSpectrum, "real-phase condition needs a real spectrum", r);
    const auto pivots = anchor_pivots(centre);
    const auto psi = fix_gauge(centre, FrameGauge::balanced, pivots).psi(band);
    auto x_at = [&](int axis, double t) {
        return local_frame(model, add(r, unit_axis(axis), t), centre, FrameGauge::balanced, pivots, opts.frame).metric_x;
    };
    std::array<cplx, 3> out{};
    for (int a = 0; a < static_cast<int>(std::min<std::size_t>(model.param_dim(), 3)); ++a) {
        const auto dx = (1.0 / (12.0 * h)) * (x_at(a, -2.0 * h) - 8.0 * x_at(a, -h) + 8.0 * x_at(a, h) - x_at(a, 2.0 * h));
        out[a] = inner(psi, dx * psi);
    }
    return out;
}

cplx real_phase_condition(const Model& model, const Vec3& r, std::size_t band, double h, const GeometryOptions& opts) {
    const auto c = real_phase_components(model, r, band, h, opts);
    return *std::max_element(c.begin(), c.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
}

std::optional<ConstantY> find_constant_y(const Model& model, const std::vector<Vec3>& samples, double tol,
                                         const GeometryOptions& opts) {
    if (samples.size() < 2) throw NumericalError(ErrorCode::InsufficientSamples, "find_constant_y: need at least 2 sample points");
    const std::size_t n = model.dim();
    const auto frames = map_indexed(
        samples.size(),
        [&](std::size_t i) {
            auto f = frame_at(model, samples[i], opts.frame);
            if (!f.real_spectrum) throw NumericalError(ErrorCode::ComplexSpectrum, "find_constant_y: complex spectrum at sample", samples[i]);
            return f;
        },
        opts.parallel);

    // Hermitian basis: E_ii, E_ij + E_ji, i (E_ij - E_ji).
    std::vector<ComplexMatrix> basis;
    for (std::size_t i = 0; i < n; ++i) {
        ComplexMatrix b(n);
        b(i, i) = 1.0;
        basis.push_back(b);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            ComplexMatrix re(n);
            re(i, j) = re(j, i) = 1.0;
            basis.push_back(re);
            ComplexMatrix im(n);
            im(i, j) = I_UNIT;
            im(j, i) = -I_UNIT;
            basis.push_back(im);
        }

    // Y psi parallel to phi: the component of Y psi orthogonal to phi vanishes.
    const std::size_t rows = frames.size() * n * 2 * n;
    ComplexMatrix m(rows, basis.size());
    std::size_t row = 0;
    for (const auto& f : frames)
        for (std::size_t j = 0; j < n; ++j) {
            const auto psi = scaled(f.psi(j), 1.0 / norm2(f.psi(j)));
            const auto phi = scaled(f.phi(j), 1.0 / norm2(f.phi(j)));
            for (std::size_t k = 0; k < basis.size(); ++k) {
                const auto y_psi = basis[k] * psi;
                const auto v = axpy(-inner(phi, y_psi), phi, y_psi);
                for (std::size_t i = 0; i < n; ++i) {
                    m(row + 2 * i, k) = v[i].real();
                    m(row + 2 * i + 1, k) = v[i].imag();
                }
            }
            row += 2 * n;
        }
    const auto svd = linalg::svd_jacobi(m);
    const std::size_t last = basis.size() - 1;
    ComplexMatrix y(n);
    for (std::size_t k = 0; k < basis.size(); ++k) y += svd.v(k, last).real() * basis[k];

    // Scale so the first largest-magnitude entry (row-major) is 1 in modulus and real positive where real.
    double biggest = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) biggest = std::max(biggest, std::abs(y(i, j)));
    if (biggest == 0.0) return std::nullopt;
    cplx lead{};
    for (std::size_t i = 0; i < n * n && lead == cplx{}; ++i)
        if (std::abs(y(i / n, i % n)) >= biggest * (1.0 - 1e-9)) lead = y(i / n, i % n);
    const double sign = lead.real() < 0.0 ? -1.0 : 1.0;
    y *= cplx{sign / biggest, 0.0};

    // alpha is reported for the first sample; it is constant on each connected
    // real-spectrum region but may flip between regions (BdG upper/lower cone).
    ConstantY out{y, std::vector<int>(n, 0), 0.0};
    for (const auto& f : frames)
        for (std::size_t j = 0; j < n; ++j) {
            const auto psi = f.psi(j);
            const auto phi = f.phi(j);
            const auto y_psi = y * psi;
            const double len = norm2(y_psi);
            if (len <= 1e-12 * norm2(psi)) return std::nullopt;
            const cplx kappa = inner(phi, y_psi) / inner(phi, phi);
            const double res = std::max(norm2(axpy(-kappa, phi, y_psi)) / len, std::abs(kappa.imag()) / std::abs(kappa));
            out.residual = std::max(out.residual, res);
            if (out.alphas[j] == 0) out.alphas[j] = kappa.real() >= 0.0 ? 1 : -1;
        }
    if (out.residual > tol) return std::nullopt;
    return out;
}

}  // namespace holoq
