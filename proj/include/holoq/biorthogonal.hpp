#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "holoq/errors.hpp"
#include "holoq/linalg.hpp"
#include "holoq/matrix.hpp"

namespace holoq {

struct FrameOptions {
    linalg::MultiplicityOptions multiplicity;
    // NearDefective when the smallest eigenvalue gap is at or below gap_floor_rel * ||H||_F.
    double gap_floor_rel = 1e-6;
    // |Im E| <= reality_tol * (1 + |E|) counts as real.
    double reality_tol = 1e-9;
    linalg::InverseOptions inverse;
};

/// Paired right (contravariant) and left (covariant) eigenvectors of one
/// Hamiltonian. Columns of `right` are |psi_j>, columns of `left` are |phi^j>,
/// with <phi^i|psi_j> = delta_ij and X = (A A^dag)^-1 mapping psi_j to phi^j.
struct BiorthFrame {
    CVector energies;
    ComplexMatrix right;
    ComplexMatrix left;
    ComplexMatrix metric_x;
    bool real_spectrum = false;
    double min_gap = 0.0;

    std::size_t dim() const { return energies.size(); }
    CVector psi(std::size_t j) const { return right.column(j); }
    CVector phi(std::size_t j) const { return left.column(j); }
};

// NonDiagonalizable carries the classification that triggered it.
class NonDiagonalizableError : public NumericalError {
public:
    NonDiagonalizableError(const std::string& what, linalg::SpectrumReport report)
        : NumericalError(ErrorCode::NonDiagonalizable, what), report_(std::move(report)) {}
    const linalg::SpectrumReport& report() const { return report_; }

private:
    linalg::SpectrumReport report_;
};

/// Canonical-gauge frame: unit-norm right vectors whose first non-negligible
/// component is real positive; left vectors are the conjugated rows of A^-1.
/// Energies follow the descending-real-part order of linalg::sorted_order.
BiorthFrame build_frame(const ComplexMatrix& h, const FrameOptions& opts = {});

// Frame for explicitly supplied right vectors (any gauge). No diagonalisability
// check beyond invertibility of A.
BiorthFrame frame_from_right(CVector energies, ComplexMatrix right, const FrameOptions& opts = {});

ComplexMatrix metric(const BiorthFrame& frame, const linalg::InverseOptions& opts = {});

struct Expansion {
    CVector contravariant;  // c^j = <phi^j|Psi>
    CVector covariant;      // c_j = <psi_j|Psi>
};

Expansion expand(const BiorthFrame& frame, std::span<const cplx> psi);
CVector reconstruct(const BiorthFrame& frame, const Expansion& e);

double pseudo_norm(const BiorthFrame& frame, std::span<const cplx> psi);
// <Psi|X|Psi> before discarding the (rounding-level) imaginary part.
cplx pseudo_norm_complex(const BiorthFrame& frame, std::span<const cplx> psi);

// psi_j -> f_j psi_j, phi^j -> phi^j / conj(f_j); X recomputed.
BiorthFrame regauge(const BiorthFrame& frame, std::span<const cplx> factors);

// Gauge with ||psi_j|| = ||phi^j|| and the first component of psi_j real positive.
BiorthFrame balance(const BiorthFrame& frame);

// Sum_j |psi_j><phi^j|, identity for a valid frame.
ComplexMatrix completeness(const BiorthFrame& frame);
// Max |<phi^i|psi_j> - delta_ij|.
double biorthonormality_error(const BiorthFrame& frame);

// perm[j] = index in `next` of the band continuing band j of `prev`
// (greedy maximal |<phi^j(prev)|psi_k(next)>|).
std::vector<std::size_t> match_bands(const BiorthFrame& prev, const BiorthFrame& next);

// Cross-check route: left vectors from an independent eigendecomposition of
// H^dag, paired by conjugate eigenvalue and scaled to <phi^j|psi_j> = 1.
ComplexMatrix left_vectors_from_adjoint(const ComplexMatrix& h, const BiorthFrame& frame);

}  // namespace holoq
