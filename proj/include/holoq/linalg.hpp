#pragma once

#include <optional>
#include <vector>

#include "holoq/matrix.hpp"

namespace holoq::linalg {

struct EigenOptions {
    // Residual target for returned pairs, relative to ||M||_F.
    double tol = 1e-10;
    // QR sweeps allowed per deflated eigenvalue before NoConvergence.
    int max_iterations = 100;
    // Use the closed form for n == 2.
    bool closed_form_2x2 = true;
};

struct EigenDecomposition {
    CVector values;
    std::vector<CVector> vectors;  // unit norm, canonical phase
};

/// Eigenpairs of a general complex matrix, sorted by descending real part
/// (ties by descending imaginary part). Defective matrices still yield n
/// pairs; vectors may repeat.
EigenDecomposition eigendecompose(const ComplexMatrix& m, const EigenOptions& opts = {});

// Closed form for 2x2 input.
EigenDecomposition eigendecompose_2x2(const ComplexMatrix& m);

// Eigenvalues only, via Householder-Hessenberg reduction and single-shift QR.
CVector eigenvalues_qr(const ComplexMatrix& m, int max_iterations = 100);

// Unit Euclidean norm, first component above 1e-10*max|v_i| made real positive.
void canonicalize(CVector& v);

// Descending real part, ties (within 1e-12 relative) by descending imaginary part.
bool precedes(cplx a, cplx b, double scale);
std::vector<std::size_t> sorted_order(const CVector& values);

struct SpectrumCluster {
    cplx eigenvalue;  // cluster mean
    int eta = 0;      // algebraic multiplicity
    int zeta = 0;     // geometric multiplicity
};

struct SpectrumReport {
    std::vector<SpectrumCluster> clusters;
    bool diagonalizable = true;
    double cluster_tol = 0.0;  // absolute merge distance actually used
};

struct MultiplicityOptions {
    // Absolute merge distance; when unset, cluster_tol_rel * ||M||_F is used.
    std::optional<double> cluster_tol;
    double cluster_tol_rel = 1e-6;
    double rank_tol = 1e-10;
    EigenOptions eig;
};

SpectrumReport multiplicity_report(const ComplexMatrix& m, const MultiplicityOptions& opts = {});

struct SingularValueDecomposition {
    std::vector<double> values;  // descending
    ComplexMatrix v;             // right singular vectors as columns, same order
};

// One-sided (Hestenes) Jacobi SVD; works for any rows >= 1, cols >= 1.
SingularValueDecomposition svd_jacobi(const ComplexMatrix& m);
std::vector<double> singular_values(const ComplexMatrix& m);

// Count of singular values above rank_tol * sigma_max; 0 for the zero matrix.
int rank(const ComplexMatrix& m, double rank_tol = 1e-10);

struct InverseOptions {
    double condition_cap = 1e12;  // 1-norm condition estimate
};

ComplexMatrix inverse(const ComplexMatrix& m, const InverseOptions& opts = {});
double condition_number_1(const ComplexMatrix& m, const ComplexMatrix& m_inv);

}  // namespace holoq::linalg
