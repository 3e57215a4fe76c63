#include "holoq/scan.hpp"

#include <cmath>
#include <limits>

namespace holoq {

namespace {

double along(double lo, double hi, std::size_t i, std::size_t n) {
    if (n <= 1) return lo;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

CurvaturePoint curvature_point(const Model& model, const Vec3& r, int axis_a, int axis_b, double h, std::size_t band,
                               const GeometryOptions& opts) {
    CurvaturePoint p{r, {}, std::nullopt};
    try {
        p.b = curvature_plaquette(model, r, axis_a, axis_b, h, band, opts);
    } catch (const NumericalError& e) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        p.b = {nan, nan};
        p.status = e.code();
    }
    return p;
}

}  // namespace

Vec3 Grid2D::point(std::size_t index) const {
    Vec3 r = origin;
    r.at(static_cast<std::size_t>(axis_a)) = along(a_min, a_max, index / nb, na);
    r.at(static_cast<std::size_t>(axis_b)) = along(b_min, b_max, index % nb, nb);
    return r;
}

std::vector<Vec3> Grid2D::points() const {
    std::vector<Vec3> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(point(i));
    return out;
}

SpectrumPoint spectrum_at(const Model& model, const Vec3& r, const linalg::MultiplicityOptions& opts, double reality_tol) {
    const auto h = model.hamiltonian(r);
    SpectrumPoint p;
    p.r = r;
    try {
        p.eigenvalues = linalg::eigendecompose(h, opts.eig).values;
        p.report = linalg::multiplicity_report(h, opts);
    } catch (NumericalError& e) {
        if (!e.where()) e.set_where(r);
        throw;
    }
    p.real_spectrum = true;
    p.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.eigenvalues.size(); ++i) {
        const cplx e = p.eigenvalues[i];
        if (std::abs(e.imag()) > reality_tol * (1.0 + std::abs(e))) p.real_spectrum = false;
        for (std::size_t j = i + 1; j < p.eigenvalues.size(); ++j) p.min_gap = std::min(p.min_gap, std::abs(e - p.eigenvalues[j]));
    }
    if (p.eigenvalues.size() < 2) p.min_gap = 0.0;
    return p;
}

std::vector<SpectrumPoint> ep_scan_serial(const Model& model, const std::vector<Vec3>& points,
                                          const linalg::MultiplicityOptions& opts, double reality_tol) {
    std::vector<SpectrumPoint> out;
    out.reserve(points.size());
    for (const auto& r : points) out.push_back(spectrum_at(model, r, opts, reality_tol));
    return out;
}

std::vector<SpectrumPoint> ep_scan(const Model& model, const std::vector<Vec3>& points, const linalg::MultiplicityOptions& opts,
                                   const ParallelOptions& par, double reality_tol) {
    return map_indexed(points.size(), [&](std::size_t i) { return spectrum_at(model, points[i], opts, reality_tol); }, par);
}

std::vector<CurvaturePoint> curvature_field_serial(const Model& model, const std::vector<Vec3>& points, int axis_a, int axis_b,
                                                   double h, std::size_t band, const GeometryOptions& opts) {
    std::vector<CurvaturePoint> out;
    out.reserve(points.size());
    for (const auto& r : points) out.push_back(curvature_point(model, r, axis_a, axis_b, h, band, opts));
    return out;
}

std::vector<CurvaturePoint> curvature_field(const Model& model, const std::vector<Vec3>& points, int axis_a, int axis_b,
                                            double h, std::size_t band, const GeometryOptions& opts) {
    return map_indexed(
        points.size(), [&](std::size_t i) { return curvature_point(model, points[i], axis_a, axis_b, h, band, opts); },
        opts.parallel);
}

}  // namespace holoq
