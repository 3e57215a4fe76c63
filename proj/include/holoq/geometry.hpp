#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "holoq/biorthogonal.hpp"
#include "holoq/gauge.hpp"
#include "holoq/models.hpp"
#include "holoq/parallel.hpp"

namespace holoq {

struct GeometryOptions {
    FrameOptions frame;
    // An edge a -> b is usable when |<phi_a|psi_b><phi_b|psi_a> - 1| <= edge_tol.
    double edge_tol = 0.5;
    // Bisection depth allowed per loop edge before EdgeTooLong.
    int max_refine_depth = 16;
    // Randomised per-vertex gauges used to fill HolonomyResult::gauge_checksum.
    int gauge_trials = 4;
    std::uint64_t seed = 0;
    ParallelOptions parallel;
};

/// Closed polygon R_0 .. R_K with R_K == R_0.
struct ParameterLoop {
    std::vector<Vec3> vertices;

    // R(u) = centre + radius (cos u e_a + sin u e_b), u = 2 pi k / K; counterclockwise in the (a, b) plane.
    static ParameterLoop circle(const Vec3& centre, double radius, std::size_t k, int axis_a = 0, int axis_b = 1);
    // Circle of polar angle theta on the sphere |R| = radius about the z axis, counterclockwise seen from +z.
    static ParameterLoop latitude(double theta, double radius, std::size_t k);
    // All vertices at one point.
    static ParameterLoop degenerate(const Vec3& point, std::size_t k);

    std::size_t edges() const { return vertices.empty() ? 0 : vertices.size() - 1; }
    // NotClosed unless K >= 3 and |R_K - R_0| <= 1e-12.
    void validate() const;
};

/// Frames around a loop with the tracked band index at each vertex. The cycle
/// closes implicitly (the last entry connects back to the first).
struct LoopFrames {
    std::vector<Vec3> points;
    std::vector<BiorthFrame> frames;
    std::vector<std::size_t> bands;
    // Index into `points` where each original loop edge starts.
    std::vector<std::size_t> edge_starts;
};

struct HolonomyResult {
    // Complex phase with Re beta reduced to (-pi, pi].
    cplx beta;
    std::size_t band = 0;
    // i (Log z1 - Log(z1 z2) / 2) per original loop edge, z1 = <phi_a|psi_b>, z2 = <phi_b|psi_a>.
    std::vector<cplx> increments;
    // sum(increments) = beta + 2 pi winding.
    long winding = 0;
    // Largest |delta beta| over randomised gauge re-runs.
    double gauge_checksum = 0.0;
};

// Log z1 - Log(z1 z2) / 2 for the edge a -> b; the second term is gauge
// invariant and removes the first-order metric bias of the overlap.
cplx edge_increment(const BiorthFrame& a, std::size_t band_a, const BiorthFrame& b, std::size_t band_b);
// |z1 z2 - 1|, gauge invariant.
double edge_defect(const BiorthFrame& a, std::size_t band_a, const BiorthFrame& b, std::size_t band_b);

LoopFrames loop_frames(const Model& model, const ParameterLoop& loop, std::size_t band, const GeometryOptions& opts = {});
HolonomyResult holonomy_from_frames(const LoopFrames& frames);
HolonomyResult holonomy_discrete(const Model& model, const ParameterLoop& loop, std::size_t band,
                                 const GeometryOptions& opts = {});

// psi' = f psi, phi' = phi / conj(f) on the tracked band of every vertex.
LoopFrames apply_gauge(const LoopFrames& frames, const GaugeAssignment& gauge);

/// A_j . d = i <phi^j| d psi_j / dR . d> by central differences, with the
/// neighbours matched to R's bands and fixed in a gauge anchored at R.
cplx connection_fd(const Model& model, const Vec3& r, const Vec3& direction, double h, std::size_t band,
                   FrameGauge gauge = FrameGauge::balanced, const GeometryOptions& opts = {});
// i alpha <psi|Y|d psi> with the same gauge handling.
cplx connection_y_form(const Model& model, const Vec3& r, const Vec3& direction, double h, std::size_t band,
                       const ComplexMatrix& y, int alpha, const GeometryOptions& opts = {});
// i (Log z1 - Log(z1 z2)/2) / h for the edge r - h/2 d -> r + h/2 d in the balanced anchored gauge.
cplx connection_loop_increment(const Model& model, const Vec3& r, const Vec3& direction, double h, std::size_t band,
                               const GeometryOptions& opts = {});

/// (i / h^2) times the summed edge increments of the counterclockwise h x h
/// plaquette centred at R in the (axis_a, axis_b) plane.
cplx curvature_plaquette(const Model& model, const Vec3& r, int axis_a, int axis_b, double h, std::size_t band,
                         const GeometryOptions& opts = {});
// (B_yz, B_zx, B_xy) from three plaquettes.
std::array<cplx, 3> curvature_vector(const Model& model, const Vec3& r, double h, std::size_t band,
                                     const GeometryOptions& opts = {});

/// Oriented triangle mesh; triangles are counterclockwise seen from the side
/// the normal points to.
struct TriangulatedSurface {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::size_t, 3>> triangles;
    bool closed = false;

    // Axis-aligned cube, n x n squares per face, outward normals.
    static TriangulatedSurface cube(const Vec3& centre, double side, std::size_t n = 2);
    static TriangulatedSurface sphere(const Vec3& centre, double radius, std::size_t n_theta, std::size_t n_phi);
    // Polar cap 0 <= theta <= theta_max about +z, outward normal.
    static TriangulatedSurface cap(const Vec3& centre, double radius, double theta_max, std::size_t n_theta,
                                   std::size_t n_phi);
};

struct FluxResult {
    cplx flux;
    std::size_t triangles = 0;
    // Total of the per-triangle 2 pi reductions.
    long winding = 0;
};

// Sum of per-triangle holonomies (each with Re reduced to (-pi, pi]). `band`
// labels the first vertex of each connected piece and is carried to the
// others by overlap continuity.
FluxResult flux_surface(const Model& model, const TriangulatedSurface& surface, std::size_t band,
                        const GeometryOptions& opts = {});

struct AuxiliaryCheck {
    // max_c || (curl F)_c - i (F x F)_c ||_F
    double residual = 0.0;
    // Same with the opposite sign on F x F.
    double opposite_sign_residual = 0.0;
};

/// F_a = -i sum_n |d_a psi_n><phi^n| by central differences around R, curl
/// by central differences of F.
AuxiliaryCheck auxiliary_operator_check(const Model& model, const Vec3& r, double h, const GeometryOptions& opts = {});

/// <psi_j| dX/dR_a |psi_j> for each parameter direction, balanced gauge, fourth-order stencil.
std::array<cplx, 3> real_phase_components(const Model& model, const Vec3& r, std::size_t band, double h = 1e-3,
                                          const GeometryOptions& opts = {});
// Largest-magnitude component of real_phase_components.
cplx real_phase_condition(const Model& model, const Vec3& r, std::size_t band, double h = 1e-3,
                          const GeometryOptions& opts = {});

/// Hermitian Y with phi^j = alpha_j Y psi_j at every sample (up to a real
/// per-band normalisation), or nothing when the residual exceeds tol.
/// alphas are those of the first sample.
std::optional<ConstantY> find_constant_y(const Model& model, const std::vector<Vec3>& samples, double tol = 1e-6,
                                         const GeometryOptions& opts = {});

}  // namespace holoq
