#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "holoq/linalg.hpp"
#include "holoq/matrix.hpp"
#include "holoq/models.hpp"

namespace holoq::testing {

inline constexpr double pi = std::numbers::pi;

// Seeded generators for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::size_t index(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
    cplx complex() { return {normal(), normal()}; }

    ComplexMatrix matrix(std::size_t n) {
        ComplexMatrix m(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = complex();
        return m;
    }

    ComplexMatrix hermitian(std::size_t n) {
        const auto m = matrix(n);
        return cplx{0.5, 0.0} * (m + m.adjoint());
    }

    CVector vector(std::size_t n) {
        CVector v(n);
        for (auto& x : v) x = complex();
        return v;
    }

    // S diag(values) S^-1 with a well-conditioned S.
    ComplexMatrix with_spectrum(const CVector& values) {
        const std::size_t n = values.size();
        ComplexMatrix s = ComplexMatrix::identity(n);
        const auto noise = matrix(n);
        s += cplx{0.3 / std::sqrt(static_cast<double>(n)), 0.0} * noise;
        ComplexMatrix d(n);
        for (std::size_t i = 0; i < n; ++i) d(i, i) = values[i];
        return s * d * linalg::inverse(s);
    }

    // Random real spectrum with gaps of at least `gap`.
    CVector real_spectrum(std::size_t n, double gap = 0.5) {
        CVector v(n);
        double e = uniform(-2.0, 0.0);
        for (auto& x : v) {
            x = e;
            e += gap + uniform(0.0, 1.0);
        }
        return v;
    }

    // p_z = 0 plane, |p| in [lo, hi] * s.
    Vec3 dirac_point(double s = 1.0, double lo = 1.3, double hi = 3.0) {
        const double rho = s * uniform(lo, hi);
        const double a = uniform(0.0, 2.0 * pi);
        return {rho * std::cos(a), rho * std::sin(a), 0.0};
    }

    // Inside the cone z^2 > x^2 + y^2, away from its surface and the origin.
    Vec3 bdg_interior(double z_lo = 0.6, double z_hi = 2.0, double max_ratio = 0.6, bool upper = false) {
        const double z = uniform(z_lo, z_hi) * (upper || uniform(0.0, 1.0) < 0.5 ? 1.0 : -1.0);
        const double r = std::abs(z) * uniform(0.0, max_ratio);
        const double a = uniform(0.0, 2.0 * pi);
        return {r * std::cos(a), r * std::sin(a), z};
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline double rel_err(cplx got, cplx want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

inline double max_abs(const ComplexMatrix& m) {
    double out = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out = std::max(out, std::abs(m(i, j)));
    return out;
}

// Simpson rule on [a, b] with an even number of intervals.
template <class F>
double simpson(F&& f, double a, double b, int intervals) {
    if (intervals % 2) ++intervals;
    const double h = (b - a) / intervals;
    double s = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace holoq::testing
