#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "holoq/biorthogonal.hpp"
#include "holoq/models.hpp"

namespace holoq {

/// Time-sampled trajectory R(t). When `curve` is set, propagation evaluates H
/// at the exact midpoint R((t_k + t_{k+1}) / 2); otherwise samples are joined
/// linearly.
struct ParameterPath {
    std::vector<double> times;
    std::vector<Vec3> points;
    bool closed = false;
    std::function<Vec3(double)> curve;

    // R(t) = centre + radius (cos(2 pi t / T) e_a + sin(2 pi t / T) e_b), `steps` intervals.
    static ParameterPath circle(const Vec3& centre, double radius, double total_time, std::size_t steps, int axis_a = 0,
                                int axis_b = 1);
    // Polar-angle circle about z on |R| = radius, counterclockwise seen from +z.
    static ParameterPath latitude(double theta, double radius, double total_time, std::size_t steps);
    static ParameterPath line(const Vec3& from, const Vec3& to, double total_time, std::size_t steps);
    static ParameterPath constant(const Vec3& point, double total_time, std::size_t steps);
    // Out and back along the same segment: zero enclosed area.
    static ParameterPath there_and_back(const Vec3& from, const Vec3& to, double total_time, std::size_t steps);

    std::size_t size() const { return times.size(); }
    Vec3 at(double t) const;
    // Strictly increasing times, matching lengths, closure within 1e-12 when closed.
    void validate() const;
};

enum class EvolutionMode { adiabatic, free };

struct EvolutionOptions {
    EvolutionMode mode = EvolutionMode::adiabatic;
    // Tracked band; when unset, the band with the largest initial |c^j|.
    std::optional<std::size_t> band;
    // StepTooCoarse when |<phi_k|psi_k+1><phi_k+1|psi_k> - 1| exceeds this between samples.
    double step_overlap_tol = 0.5;
    FrameOptions frame;
};

struct EvolutionRecord {
    std::vector<double> times;
    std::vector<Vec3> points;
    std::vector<CVector> states;
    // c^j(t_k) = <phi^j(R_k)|Psi(t_k)> exp(+i int_0^t E_j), bands labelled as at t = 0.
    std::vector<CVector> coefficients;
    // <phi^j(R_k)|Psi(t_k)> without the dynamical factor.
    std::vector<CVector> projections;
    std::vector<double> pseudo_norm_trace;
    std::vector<cplx> pseudo_norm_complex;
    // max over k and j != band of |c^j| / |c^band|.
    double leakage = 0.0;
    std::vector<double> leakage_trace;
    // int_0^T E_band dt (midpoint rule, matching the propagator).
    cplx dynamical_phase;
    std::size_t band = 0;
    bool closed = false;
};

// A diag(exp(-i E dt)) A^-1 psi.
CVector propagate_step(const ComplexMatrix& h, double dt, std::span<const cplx> psi, const FrameOptions& opts = {});
CVector propagate_step(const BiorthFrame& frame, double dt, std::span<const cplx> psi);

EvolutionRecord evolve_path(const Model& model, const ParameterPath& path, std::span<const cplx> psi0,
                            const EvolutionOptions& opts = {});

// max over samples and j != band of |<phi^band| d psi_j/dt> / (E_band - E_j)|, balanced gauge.
double adiabaticity_margin(const Model& model, const ParameterPath& path, std::size_t band, const FrameOptions& opts = {});

struct GeometricPhase {
    cplx beta;        // Re beta in (-pi, pi]
    long winding = 0; // unwound sum = beta + 2 pi winding
    cplx unwound;
};

// beta = -i sum_k Log(c^m_{k+1} / c^m_k) over the recorded samples, so the
// result is unwound step by step; m defaults to the record's tracked band.
GeometricPhase extract_geometric_phase(const EvolutionRecord& record, std::optional<std::size_t> band = std::nullopt,
                                       double leakage_threshold = 0.05);

}  // namespace holoq
