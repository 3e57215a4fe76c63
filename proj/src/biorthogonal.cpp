#include "holoq/biorthogonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace holoq {

namespace {

void require_dim(const BiorthFrame& frame, std::size_t n, const char* who) {
    if (frame.dim() != n)
        throw NumericalError(ErrorCode::DimensionMismatch,
                             std::string(who) + ": vector length " + std::to_string(n) + " does not match frame dimension " +
                                 std::to_string(frame.dim()));
}

double smallest_gap(const CVector& e) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = i + 1; j < e.size(); ++j) gap = std::min(gap, std::abs(e[i] - e[j]));
    return gap;
}

}  // namespace

BiorthFrame frame_from_right(CVector energies, ComplexMatrix right, const FrameOptions& opts) {
    const auto a_inv = linalg::inverse(right, opts.inverse);
    BiorthFrame f;
    f.energies = std::move(energies);
    f.left = a_inv.adjoint();  // column j = conj(row j of A^-1)
    f.right = std::move(right);
    f.metric_x = metric(f, opts.inverse);
    f.min_gap = smallest_gap(f.energies);
    f.real_spectrum = std::all_of(f.energies.begin(), f.energies.end(), [&](cplx e) {
        return std::abs(e.imag()) <= opts.reality_tol * (1.0 + std::abs(e));
    });
    return f;
}

BiorthFrame build_frame(const ComplexMatrix& h, const FrameOptions& opts) {
    auto report = linalg::multiplicity_report(h, opts.multiplicity);
    if (!report.diagonalizable) throw NonDiagonalizableError("build_frame: Hamiltonian is not diagonalizable", std::move(report));

    auto eig = linalg::eigendecompose(h, opts.multiplicity.eig);
    const double gap = smallest_gap(eig.values);
    if (h.rows() > 1 && gap <= opts.gap_floor_rel * h.frobenius_norm())
        throw NumericalError(ErrorCode::NearDefective,
                             "build_frame: eigenvalue gap " + std::to_string(gap) + " below floor (exceptional point nearby)");
    auto right = ComplexMatrix::from_columns(eig.vectors);
    return frame_from_right(std::move(eig.values), std::move(right), opts);
}

ComplexMatrix metric(const BiorthFrame& frame, const linalg::InverseOptions& opts) {
    const auto& a = frame.right;
    auto x = linalg::inverse(a * a.adjoint(), opts);
    // Symmetrise away the rounding-level anti-Hermitian part.
    const std::size_t n = x.rows();
    for (std::size_t i = 0; i < n; ++i) {
        x(i, i) = {x(i, i).real(), 0.0};
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx avg = 0.5 * (x(i, j) + std::conj(x(j, i)));
            x(i, j) = avg;
            x(j, i) = std::conj(avg);
        }
    }
    return x;
}

Expansion expand(const BiorthFrame& frame, std::span<const cplx> psi) {
    require_dim(frame, psi.size(), "expand");
    Expansion e;
    for (std::size_t j = 0; j < frame.dim(); ++j) {
        e.contravariant.push_back(inner(frame.phi(j), psi));
        e.covariant.push_back(inner(frame.psi(j), psi));
    }
    return e;
}

CVector reconstruct(const BiorthFrame& frame, const Expansion& e) { return frame.right * e.contravariant; }

cplx pseudo_norm_complex(const BiorthFrame& frame, std::span<const cplx> psi) {
    require_dim(frame, psi.size(), "pseudo_norm");
    return inner(psi, frame.metric_x * psi);
}

double pseudo_norm(const BiorthFrame& frame, std::span<const cplx> psi) { return pseudo_norm_complex(frame, psi).real(); }

BiorthFrame regauge(const BiorthFrame& frame, std::span<const cplx> factors) {
    if (factors.size() != frame.dim())
        throw NumericalError(ErrorCode::DimensionMismatch, "regauge: one factor per band required");
    BiorthFrame out = frame;
    for (std::size_t j = 0; j < frame.dim(); ++j) {
        if (factors[j] == cplx{}) throw NumericalError(ErrorCode::ZeroFactor, "regauge: zero gauge factor");
        const cplx right_scale = factors[j];
        const cplx left_scale = 1.0 / std::conj(factors[j]);
        for (std::size_t i = 0; i < frame.dim(); ++i) {
            out.right(i, j) *= right_scale;
            out.left(i, j) *= left_scale;
        }
    }
    out.metric_x = metric(out);
    return out;
}

BiorthFrame balance(const BiorthFrame& frame) {
    CVector factors(frame.dim());
    for (std::size_t j = 0; j < frame.dim(); ++j) {
        const auto psi = frame.psi(j);
        const double scale = std::sqrt(norm2(frame.phi(j)) / norm2(psi));
        std::size_t pivot = 0;
        double vmax = 0.0;
        for (const auto& z : psi) vmax = std::max(vmax, std::abs(z));
        while (std::abs(psi[pivot]) <= 1e-10 * vmax) ++pivot;
        factors[j] = scale * std::conj(psi[pivot]) / std::abs(psi[pivot]);
    }
    return regauge(frame, factors);
}

ComplexMatrix completeness(const BiorthFrame& frame) { return frame.right * frame.left.adjoint(); }

double biorthonormality_error(const BiorthFrame& frame) {
    const auto g = frame.left.adjoint() * frame.right;
    double err = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) err = std::max(err, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return err;
}

std::vector<std::size_t> match_bands(const BiorthFrame& prev, const BiorthFrame& next) {
    const std::size_t n = prev.dim();
    if (next.dim() != n) throw NumericalError(ErrorCode::DimensionMismatch, "match_bands: dimension changed");
    // Gauge-invariant overlap |<phi^j|psi_k'>| * |<phi^k'|psi_j>|.
    const auto forward = prev.left.adjoint() * next.right;
    const auto backward = next.left.adjoint() * prev.right;
    std::vector<std::tuple<double, std::size_t, std::size_t>> scores;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) scores.emplace_back(std::abs(forward(j, k) * backward(k, j)), j, k);
    std::stable_sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
    std::vector<std::size_t> perm(n, n);
    std::vector<bool> taken(n, false);
    for (const auto& [score, j, k] : scores) {
        if (perm[j] != n || taken[k]) continue;
        perm[j] = k;
        taken[k] = true;
    }
    return perm;
}

ComplexMatrix left_vectors_from_adjoint(const ComplexMatrix& h, const BiorthFrame& frame) {
    const auto eig = linalg::eigendecompose(h.adjoint());
    const std::size_t n = frame.dim();
    ComplexMatrix left(n);
    std::vector<bool> used(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t best = n;
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            if (used[k]) continue;
            const double d = std::abs(eig.values[k] - std::conj(frame.energies[j]));
            if (d < dist) {
                dist = d;
                best = k;
            }
        }
        used[best] = true;
        const auto& w = eig.vectors[best];
        const cplx overlap = inner(w, frame.psi(j));
        if (overlap == cplx{}) throw NumericalError(ErrorCode::Singular, "left_vectors_from_adjoint: orthogonal pairing");
        // <phi|psi> = 1 requires phi = w / conj(<w|psi>).
        left.set_column(j, scaled(w, 1.0 / std::conj(overlap)));
    }
    return left;
}

}  // namespace holoq
