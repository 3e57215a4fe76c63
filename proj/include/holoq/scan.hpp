#pragma once

#include <optional>
#include <vector>

#include "holoq/geometry.hpp"
#include "holoq/linalg.hpp"
#include "holoq/models.hpp"
#include "holoq/parallel.hpp"

namespace holoq {

/// Regular grid on a coordinate plane; the third coordinate is taken from `origin`.
/// Point index = ia * nb + ib, so consecutive indices run along axis_b.
struct Grid2D {
    Vec3 origin{0.0, 0.0, 0.0};
    int axis_a = 0;
    int axis_b = 1;
    double a_min = -1.0, a_max = 1.0;
    double b_min = -1.0, b_max = 1.0;
    std::size_t na = 2, nb = 2;

    std::size_t size() const { return na * nb; }
    Vec3 point(std::size_t index) const;
    std::vector<Vec3> points() const;
};

struct SpectrumPoint {
    Vec3 r{};
    CVector eigenvalues;  // sorted, descending real part
    linalg::SpectrumReport report;
    bool real_spectrum = false;
    double min_gap = 0.0;
};

SpectrumPoint spectrum_at(const Model& model, const Vec3& r, const linalg::MultiplicityOptions& opts = {},
                          double reality_tol = 1e-9);

// Reference kernel: one point after another.
std::vector<SpectrumPoint> ep_scan_serial(const Model& model, const std::vector<Vec3>& points,
                                          const linalg::MultiplicityOptions& opts = {}, double reality_tol = 1e-9);
std::vector<SpectrumPoint> ep_scan(const Model& model, const std::vector<Vec3>& points,
                                   const linalg::MultiplicityOptions& opts = {}, const ParallelOptions& par = {},
                                   double reality_tol = 1e-9);

struct CurvaturePoint {
    Vec3 r{};
    cplx b;                            // plaquette curvature; NaN when status is set
    std::optional<ErrorCode> status;   // failure at this point, if any
};

std::vector<CurvaturePoint> curvature_field_serial(const Model& model, const std::vector<Vec3>& points, int axis_a, int axis_b,
                                                   double h, std::size_t band, const GeometryOptions& opts = {});
std::vector<CurvaturePoint> curvature_field(const Model& model, const std::vector<Vec3>& points, int axis_a, int axis_b,
                                            double h, std::size_t band, const GeometryOptions& opts = {});

}  // namespace holoq
