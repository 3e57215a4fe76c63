#include "holoq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>

#include "holoq/errors.hpp"

namespace holoq::linalg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const ComplexMatrix& m, const char* who) {
    if (!m.square() || m.rows() == 0)
        throw NumericalError(ErrorCode::DimensionMismatch, std::string(who) + ": matrix must be square and non-empty");
}

// Householder reduction to upper Hessenberg form (similarity transform).
void reduce_to_hessenberg(ComplexMatrix& h) {
    const std::size_t n = h.rows();
    if (n < 3) return;
    CVector v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm += std::norm(h(i, k));
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        const cplx x0 = h(k + 1, k);
        const cplx phase = std::abs(x0) == 0.0 ? cplx{1.0} : x0 / std::abs(x0);
        const cplx alpha = -phase * xnorm;
        std::fill(v.begin(), v.end(), cplx{});
        for (std::size_t i = k + 1; i < n; ++i) v[i] = h(i, k);
        v[k + 1] -= alpha;
        double vnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm += std::norm(v[i]);
        vnorm = std::sqrt(vnorm);
        if (vnorm == 0.0) continue;
        for (std::size_t i = k + 1; i < n; ++i) v[i] /= vnorm;

        // H <- (I - 2 v v^H) H
        for (std::size_t j = k; j < n; ++j) {
            cplx s{};
            for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, j);
            s *= 2.0;
            for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= v[i] * s;
        }
        // H <- H (I - 2 v v^H)
        for (std::size_t i = 0; i < n; ++i) {
            cplx s{};
            for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * v[j];
            s *= 2.0;
            for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= s * std::conj(v[j]);
        }
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
    }
}

std::pair<cplx, cplx> roots_2x2(cplx a, cplx b, cplx c, cplx d) {
    const cplx mean = 0.5 * (a + d);
    const cplx half_diff = 0.5 * (a - d);
    const cplx q = std::sqrt(half_diff * half_diff + b * c);
    return {mean + q, mean - q};
}

struct Givens {
    double c;
    cplx s;
};

// Rotation G = [[c, s], [-conj(s), c]] with G * (x, y)^T = (r, 0)^T.
Givens make_givens(cplx x, cplx y) {
    const double ax = std::abs(x);
    const double r = std::hypot(ax, std::abs(y));
    if (r == 0.0) return {1.0, cplx{}};
    if (ax == 0.0) return {0.0, cplx{1.0}};
    return {ax / r, (x / ax) * std::conj(y) / r};
}

struct LuFactors {
    ComplexMatrix lu;
    std::vector<std::size_t> perm;
};

LuFactors lu_factor(ComplexMatrix a, double pivot_floor) {
    const std::size_t n = a.rows();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                p = i;
            }
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(perm[k], perm[p]);
        }
        if (std::abs(a(k, k)) < pivot_floor) a(k, k) = pivot_floor;
        for (std::size_t i = k + 1; i < n; ++i) {
            const cplx f = a(i, k) / a(k, k);
            a(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return {std::move(a), std::move(perm)};
}

CVector lu_solve(const LuFactors& f, const CVector& b) {
    const std::size_t n = b.size();
    CVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[f.perm[i]];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= f.lu(ii, j) * x[j];
        x[ii] /= f.lu(ii, ii);
    }
    return x;
}

// Deterministic start vector; raw generator bits keep it platform independent.
CVector start_vector(std::size_t n, std::size_t index) {
    std::mt19937_64 gen(0x9e3779b97f4a7c15ULL + index);
    CVector v(n);
    for (auto& z : v) {
        const double re = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
        const double im = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
        z = {re, im};
    }
    return v;
}

void sort_decomposition(EigenDecomposition& e) {
    const auto order = sorted_order(e.values);
    EigenDecomposition out;
    for (auto k : order) {
        out.values.push_back(e.values[k]);
        out.vectors.push_back(std::move(e.vectors[k]));
    }
    e = std::move(out);
}

double residual(const ComplexMatrix& m, cplx lambda, const CVector& v) {
    auto mv = m * v;
    for (std::size_t i = 0; i < v.size(); ++i) mv[i] -= lambda * v[i];
    return norm2(mv);
}

EigenDecomposition eigendecompose_inverse_iteration(const ComplexMatrix& m, const EigenOptions& opts) {
    const std::size_t n = m.rows();
    const double scale = std::max(m.frobenius_norm(), std::numeric_limits<double>::min());
    const CVector values = eigenvalues_qr(m, opts.max_iterations);

    const double group_tol = 1e-6 * scale;
    const cplx shift_offset = cplx{1.0, 0.5} * (64.0 * kEps * scale);
    EigenDecomposition out;
    out.values = values;
    out.vectors.resize(n);

    auto iterate = [&](std::size_t idx, bool orthogonalize) {
        ComplexMatrix shifted = m;
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= values[idx] + shift_offset;
        const auto lu = lu_factor(std::move(shifted), kEps * scale);
        CVector x = start_vector(n, idx);
        for (int it = 0; it < 4; ++it) {
            x = lu_solve(lu, x);
            if (orthogonalize) {
                for (std::size_t j = 0; j < idx; ++j) {
                    if (std::abs(values[j] - values[idx]) > group_tol) continue;
                    const cplx proj = inner(out.vectors[j], x);
                    for (std::size_t i = 0; i < n; ++i) x[i] -= proj * out.vectors[j][i];
                }
            }
            const double nx = norm2(x);
            if (!(nx > 0.0) || !std::isfinite(nx))
                throw NumericalError(ErrorCode::NoConvergence, "eigendecompose: inverse iteration broke down");
            for (auto& z : x) z /= nx;
        }
        return x;
    };

    for (std::size_t k = 0; k < n; ++k) {
        bool has_partner = false;
        for (std::size_t j = 0; j < k; ++j)
            if (std::abs(values[j] - values[k]) <= group_tol) has_partner = true;
        CVector v = iterate(k, has_partner);
        if (has_partner && residual(m, values[k], v) > opts.tol * scale) {
            // Defective cluster: the orthogonalised vector is not an eigenvector.
            v = iterate(k, false);
        }
        canonicalize(v);
        out.vectors[k] = std::move(v);
    }
    sort_decomposition(out);
    return out;
}

}  // namespace

bool precedes(cplx a, cplx b, double scale) {
    const double tie = 1e-12 * std::max(scale, 1.0);
    if (std::abs(a.real() - b.real()) > tie) return a.real() > b.real();
    if (std::abs(a.imag() - b.imag()) > tie) return a.imag() > b.imag();
    return false;
}

std::vector<std::size_t> sorted_order(const CVector& values) {
    double scale = 0.0;
    for (const auto& z : values) scale = std::max(scale, std::abs(z));
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    // Insertion sort: the tolerant comparison is not a strict weak ordering.
    for (std::size_t i = 1; i < order.size(); ++i) {
        std::size_t j = i;
        while (j > 0 && precedes(values[order[j]], values[order[j - 1]], scale)) {
            std::swap(order[j], order[j - 1]);
            --j;
        }
    }
    return order;
}

void canonicalize(CVector& v) {
    const double nv = norm2(v);
    if (nv == 0.0) return;
    double vmax = 0.0;
    for (const auto& z : v) vmax = std::max(vmax, std::abs(z));
    std::size_t pivot = 0;
    while (std::abs(v[pivot]) <= 1e-10 * vmax) ++pivot;
    const cplx phase = std::conj(v[pivot]) / std::abs(v[pivot]);
    for (auto& z : v) z *= phase / nv;
    v[pivot] = {v[pivot].real(), 0.0};  // strip rounding residue
}

EigenDecomposition eigendecompose_2x2(const ComplexMatrix& m) {
    if (m.rows() != 2 || m.cols() != 2)
        throw NumericalError(ErrorCode::DimensionMismatch, "eigendecompose_2x2: need a 2x2 matrix");
    if (!m.is_finite()) throw NumericalError(ErrorCode::NoConvergence, "eigendecompose: non-finite entries");
    const cplx a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const auto [l1, l2] = roots_2x2(a, b, c, d);
    const double scale = std::max(m.frobenius_norm(), std::numeric_limits<double>::min());

    EigenDecomposition out;
    out.values = {l1, l2};
    for (std::size_t k = 0; k < 2; ++k) {
        const cplx lam = out.values[k];
        CVector u{b, lam - a};
        CVector w{lam - d, c};
        const double nu = norm2(u), nw = norm2(w);
        CVector v;
        if (std::max(nu, nw) <= 1e-14 * scale) {
            v = CVector{k == 0 ? 1.0 : 0.0, k == 0 ? 0.0 : 1.0};  // scalar matrix
        } else {
            v = nu >= nw ? u : w;
        }
        canonicalize(v);
        out.vectors.push_back(std::move(v));
    }
    sort_decomposition(out);
    return out;
}

CVector eigenvalues_qr(const ComplexMatrix& m, int max_iterations) {
    require_square(m, "eigenvalues_qr");
    if (!m.is_finite()) throw NumericalError(ErrorCode::NoConvergence, "eigenvalues_qr: non-finite entries");
    const std::size_t n = m.rows();
    if (n == 1) return {m(0, 0)};

    ComplexMatrix h = m;
    reduce_to_hessenberg(h);
    const double hnorm = std::max(h.frobenius_norm(), std::numeric_limits<double>::min());

    CVector values(n);
    std::size_t hi = n - 1;
    int iter = 0;
    std::vector<Givens> rot(n);
    while (true) {
        if (hi == 0) {
            values[0] = h(0, 0);
            break;
        }
        std::size_t lo = hi;
        while (lo > 0) {
            const double sub = std::abs(h(lo, lo - 1));
            const double local = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
            if (sub <= kEps * local || sub <= kEps * hnorm) {
                h(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) {
            values[hi] = h(hi, hi);
            --hi;
            iter = 0;
            continue;
        }
        if (lo + 1 == hi) {
            const auto [l1, l2] = roots_2x2(h(lo, lo), h(lo, hi), h(hi, lo), h(hi, hi));
            values[lo] = l1;
            values[hi] = l2;
            if (lo == 0) break;
            hi = lo - 1;
            iter = 0;
            continue;
        }
        if (++iter > max_iterations)
            throw NumericalError(ErrorCode::NoConvergence, "eigenvalues_qr: QR iteration did not converge");

        // Wilkinson shift from the trailing 2x2 of the active block.
        cplx mu;
        if (iter % 11 == 0) {
            mu = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1)) * cplx{1.0, 1.0};  // exceptional shift
        } else {
            const auto [l1, l2] = roots_2x2(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
            mu = std::abs(l1 - h(hi, hi)) < std::abs(l2 - h(hi, hi)) ? l1 : l2;
        }

        for (std::size_t k = lo; k <= hi; ++k) h(k, k) -= mu;
        for (std::size_t k = lo; k < hi; ++k) {
            const Givens g = make_givens(h(k, k), h(k + 1, k));
            rot[k] = g;
            for (std::size_t j = k; j <= hi; ++j) {
                const cplx x = h(k, j), y = h(k + 1, j);
                h(k, j) = g.c * x + g.s * y;
                h(k + 1, j) = -std::conj(g.s) * x + g.c * y;
            }
        }
        for (std::size_t k = lo; k < hi; ++k) {
            const Givens g = rot[k];
            const std::size_t last = std::min(k + 2, hi);
            for (std::size_t i = lo; i <= last; ++i) {
                const cplx x = h(i, k), y = h(i, k + 1);
                h(i, k) = x * g.c + y * std::conj(g.s);
                h(i, k + 1) = -x * g.s + y * g.c;
            }
        }
        for (std::size_t k = lo; k <= hi; ++k) h(k, k) += mu;
    }
    return values;
}

EigenDecomposition eigendecompose(const ComplexMatrix& m, const EigenOptions& opts) {
    require_square(m, "eigendecompose");
    if (!m.is_finite()) throw NumericalError(ErrorCode::NoConvergence, "eigendecompose: non-finite entries");
    if (m.rows() == 1) return {{m(0, 0)}, {CVector{1.0}}};
    if (m.rows() == 2 && opts.closed_form_2x2) return eigendecompose_2x2(m);
    return eigendecompose_inverse_iteration(m, opts);
}

SingularValueDecomposition svd_jacobi(const ComplexMatrix& m) {
    ComplexMatrix a = m;
    const std::size_t rows = a.rows(), cols = a.cols();
    ComplexMatrix v = ComplexMatrix::identity(cols);
    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < cols; ++p) {
            for (std::size_t q = p + 1; q < cols; ++q) {
                double alpha = 0.0, beta = 0.0;
                cplx gamma{};
                for (std::size_t i = 0; i < rows; ++i) {
                    alpha += std::norm(a(i, p));
                    beta += std::norm(a(i, q));
                    gamma += std::conj(a(i, p)) * a(i, q);
                }
                const double g = std::abs(gamma);
                if (g == 0.0 || g <= kEps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const cplx phase = gamma / g;  // rotate column q so that <a_p|a_q> is real
                const double zeta = (beta - alpha) / (2.0 * g);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < rows; ++i) {
                    const cplx ap = a(i, p), aq = a(i, q) * std::conj(phase);
                    a(i, p) = c * ap - s * aq;
                    a(i, q) = s * ap + c * aq;
                }
                for (std::size_t i = 0; i < cols; ++i) {
                    const cplx vp = v(i, p), vq = v(i, q) * std::conj(phase);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }
    std::vector<double> sv(cols);
    for (std::size_t j = 0; j < cols; ++j) sv[j] = norm2(a.column(j));
    std::vector<std::size_t> order(cols);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sv[x] > sv[y]; });
    SingularValueDecomposition out;
    out.v = ComplexMatrix(cols, cols);
    for (std::size_t k = 0; k < cols; ++k) {
        out.values.push_back(sv[order[k]]);
        out.v.set_column(k, v.column(order[k]));
    }
    // For wide inputs only min(rows, cols) values are meaningful; the rest are ~0.
    return out;
}

std::vector<double> singular_values(const ComplexMatrix& m) { return svd_jacobi(m).values; }

int rank(const ComplexMatrix& m, double rank_tol) {
    const auto sv = singular_values(m);
    if (sv.empty() || sv.front() == 0.0) return 0;
    const double thresh = rank_tol * sv.front();
    return static_cast<int>(std::count_if(sv.begin(), sv.end(), [&](double s) { return s > thresh; }));
}

SpectrumReport multiplicity_report(const ComplexMatrix& m, const MultiplicityOptions& opts) {
    require_square(m, "multiplicity_report");
    const std::size_t n = m.rows();
    const double mnorm = m.frobenius_norm();
    const CVector values = n == 2 && opts.eig.closed_form_2x2 ? eigendecompose_2x2(m).values
                                                              : eigenvalues_qr(m, opts.eig.max_iterations);
    SpectrumReport report;
    report.cluster_tol = opts.cluster_tol.value_or(opts.cluster_tol_rel * mnorm);

    // Single-linkage clustering via union-find.
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(values[i] - values[j]) <= report.cluster_tol) parent[find(i)] = find(j);

    std::vector<std::vector<std::size_t>> groups;
    std::vector<long> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto root = find(i);
        if (slot[root] < 0) {
            slot[root] = static_cast<long>(groups.size());
            groups.emplace_back();
        }
        groups[static_cast<std::size_t>(slot[root])].push_back(i);
    }

    for (const auto& g : groups) {
        cplx mean{};
        for (auto i : g) mean += values[i];
        mean /= static_cast<double>(g.size());
        double radius = 0.0;
        for (auto i : g) radius = std::max(radius, std::abs(values[i] - mean));

        ComplexMatrix shifted = m;
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= mean;
        const auto sv = singular_values(shifted);
        // Singular values inside the cluster spread are numerically zero.
        const double thresh = std::max(opts.rank_tol * (sv.empty() ? 0.0 : sv.front()), 2.0 * radius);
        const int r = static_cast<int>(std::count_if(sv.begin(), sv.end(), [&](double s) { return s > thresh; }));

        SpectrumCluster c;
        c.eigenvalue = mean;
        c.eta = static_cast<int>(g.size());
        c.zeta = std::clamp(static_cast<int>(n) - r, 1, c.eta);
        if (c.zeta != c.eta) report.diagonalizable = false;
        report.clusters.push_back(c);
    }
    CVector means;
    for (const auto& c : report.clusters) means.push_back(c.eigenvalue);
    const auto sorted = sorted_order(means);
    std::vector<SpectrumCluster> clusters;
    for (auto k : sorted) clusters.push_back(report.clusters[k]);
    report.clusters = std::move(clusters);
    return report;
}

double condition_number_1(const ComplexMatrix& m, const ComplexMatrix& m_inv) { return m.norm1() * m_inv.norm1(); }

ComplexMatrix inverse(const ComplexMatrix& m, const InverseOptions& opts) {
    require_square(m, "inverse");
    const std::size_t n = m.rows();
    ComplexMatrix a = m;
    ComplexMatrix inv = ComplexMatrix::identity(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (std::abs(a(p, k)) == 0.0) throw NumericalError(ErrorCode::Singular, "inverse: matrix is singular");
        if (p != k)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(k, j), a(p, j));
                std::swap(inv(k, j), inv(p, j));
            }
        const cplx piv = a(k, k);
        for (std::size_t j = 0; j < n; ++j) {
            a(k, j) /= piv;
            inv(k, j) /= piv;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const cplx f = a(i, k);
            if (f == cplx{}) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= f * a(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    const double cond = condition_number_1(m, inv);
    if (!std::isfinite(cond) || cond > opts.condition_cap)
        throw NumericalError(ErrorCode::Singular, "inverse: condition estimate " + std::to_string(cond) + " exceeds cap");
    return inv;
}

}  // namespace holoq::linalg
