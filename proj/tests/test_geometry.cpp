#include <doctest.h>

#include <cmath>

#include "holoq/geometry.hpp"
#include "support.hpp"

using namespace holoq;
using holoq::testing::Gen;
using holoq::testing::pi;

namespace {

const double kRoot2 = std::sqrt(2.0);
const double kTheta = pi / 8.0;
const Vec3 kXHat{1.0, 0.0, 0.0};

double dirac_disk_flux(double s = 1.0) {
    const auto ring = [s](double r) {
        return r * testing::simpson(
                       [&](double a) {
                           const double x = 2.0 + r * std::cos(a);
                           const double y = r * std::sin(a);
                           return s / (2.0 * std::pow(x * x + y * y - s * s, 1.5));
                       },
                       0.0, 2.0 * pi, 200);
    };
    return testing::simpson(ring, 0.0, 0.5, 200);
}

// Band-0 BdG flux through the unit-sphere cap 0 <= theta <= theta_max, outward normal:
// B . n = 1 / (2 cos(2 theta)^{3/2}).
double bdg_cap_flux(double theta_max) {
    return testing::simpson([](double t) { return pi * std::sin(t) / std::pow(std::cos(2.0 * t), 1.5); }, 0.0, theta_max,
                            4000);
}

ErrorCode code_of(const auto& f) {
    try {
        f();
    } catch (const NumericalError& e) {
        return e.code();
    }
    FAIL("expected a NumericalError");
    return ErrorCode::NoConvergence;
}

}  // namespace

TEST_CASE("ParameterLoop: construction and validation") {
    const auto c = ParameterLoop::circle({2.0, 0.0, 0.0}, 0.5, 8);
    CHECK(c.edges() == 8);
    CHECK(c.vertices.front() == c.vertices.back());
    CHECK_NOTHROW(c.validate());
    ParameterLoop open = c;
    open.vertices.back()[0] += 1e-9;
    CHECK(code_of([&] { open.validate(); }) == ErrorCode::NotClosed);
    ParameterLoop tiny{{{0, 0, 1}, {0, 0.1, 1}, {0, 0, 1}}};
    CHECK(code_of([&] { tiny.validate(); }) == ErrorCode::NotClosed);
}

TEST_CASE("connection_fd: worked examples") {
    SUBCASE("Hermitian limit gives a real connection") {
        Gen g(1);
        const auto m = Model::dirac(0.0);
        for (int t = 0; t < 20; ++t) {
            const Vec3 r{g.uniform(0.5, 2.0), g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0)};
            const Vec3 d{g.normal(), g.normal(), g.normal()};
            const double n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
            const auto a = connection_fd(m, r, {d[0] / n, d[1] / n, d[2] / n}, 1e-4, 0);
            CHECK(std::abs(a.imag()) < 1e-8);
        }
    }
    SUBCASE("Dirac gain and loss makes it complex") {
        const auto a = connection_fd(Model::dirac(1.0), {kRoot2, 0.0, 0.0}, {0.0, 1.0, 0.0}, 1e-4, 0);
        CHECK(std::abs(a.imag()) > 1e-3);
    }
}

TEST_CASE("property: BdG connection three ways") {
    Gen g(2);
    const auto m = Model::bdg();
    const auto sz = pauli::z();
    for (int t = 0; t < 50; ++t) {
        const Vec3 r = g.bdg_interior(0.8, 2.0, 0.5, true);
        const Vec3 d{g.normal(), g.normal(), g.normal()};
        const double n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        const Vec3 u{d[0] / n, d[1] / n, d[2] / n};
        for (std::size_t band : {0u, 1u}) {
            const int alpha = band == 0 ? 1 : -1;
            const auto fd = connection_fd(m, r, u, 1e-4, band);
            const auto yf = connection_y_form(m, r, u, 1e-4, band, sz, alpha);
            const auto loop = connection_loop_increment(m, r, u, 1e-4, band);
            CHECK(std::abs(fd - yf) < 1e-7);
            CHECK(std::abs(fd - loop) < 1e-7);
        }
    }
}

TEST_CASE("connection_fd: degenerate step") {
    CHECK(code_of([] { connection_fd(Model::dirac(1.0), {2.0, 0.0, 0.0}, kXHat, 1e-12, 0); }) == ErrorCode::StepDegenerate);
}

TEST_CASE("holonomy_discrete: worked examples") {
    SUBCASE("degenerate loop") {
        const auto h = holonomy_discrete(Model::dirac(1.0), ParameterLoop::degenerate({2.0, 0.0, 0.0}, 10), 0);
        CHECK(std::abs(h.beta) < 1e-14);
    }
    SUBCASE("Dirac loop is the curvature flux") {
        const auto h = holonomy_discrete(Model::dirac(1.0), ParameterLoop::circle({2.0, 0.0, 0.0}, 0.5, 400), 0);
        const double q = dirac_disk_flux();
        // beta = flux of B_z = -i s / (2 (rho^2 - s^2)^{3/2}) for band 0.
        CHECK(std::abs(h.beta - cplx{0.0, -q}) <= 1e-3 * q);
        CHECK(std::abs(h.beta.real()) <= 1e-6 * std::abs(h.beta));
        cplx sum{};
        for (const auto& inc : h.increments) sum += inc;
        CHECK(std::abs(sum - h.beta - 2.0 * pi * static_cast<double>(h.winding)) < 1e-12);
        CHECK(h.gauge_checksum <= 1e-10);
    }
    SUBCASE("BdG latitude loop is real") {
        const auto h = holonomy_discrete(Model::bdg(), ParameterLoop::latitude(kTheta, 1.0, 400), 0);
        CHECK(std::abs(h.beta.imag()) < 1e-6);
        CHECK(std::abs(h.beta.real()) > 0.1);
    }
    SUBCASE("the two bands of the Dirac loop are opposite") {
        const auto loop = ParameterLoop::circle({2.0, 0.0, 0.0}, 0.5, 400);
        const auto a = holonomy_discrete(Model::dirac(1.0), loop, 0);
        const auto b = holonomy_discrete(Model::dirac(1.0), loop, 1);
        CHECK(std::abs(a.beta + b.beta) < 1e-6);
    }
}

TEST_CASE("holonomy_discrete: coarse loops are refined") {
    const auto m = Model::dirac(1.0);
    const auto coarse = holonomy_discrete(m, ParameterLoop::circle({2.0, 0.0, 0.0}, 0.5, 3), 0);
    CHECK(coarse.increments.size() == 3);
    CHECK(std::isfinite(coarse.beta.imag()));
    GeometryOptions shallow;
    shallow.max_refine_depth = 0;
    shallow.edge_tol = 1e-6;
    CHECK(code_of([&] { holonomy_discrete(m, ParameterLoop::circle({2.0, 0.0, 0.0}, 0.5, 3), 0, shallow); }) ==
          ErrorCode::EdgeTooLong);
}

TEST_CASE("property: holonomy is gauge invariant") {
    const auto m = Model::dirac(1.0);
    const auto frames = loop_frames(m, ParameterLoop::circle({2.0, 0.0, 0.0}, 0.5, 400), 0);
    const auto base = holonomy_from_frames(frames);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto gauge = GaugeAssignment::random(frames.points.size(), seed);
        for (const auto& f : gauge.factors) {
            CHECK(std::abs(f) >= 0.5);
            CHECK(std::abs(f) <= 2.0);
        }
        const auto h = holonomy_from_frames(apply_gauge(frames, gauge));
        CHECK(std::abs(h.beta - base.beta) <= 1e-10);
    }
}

TEST_CASE("apply_gauge: worked examples") {
    const auto frames = loop_frames(Model::bdg(), ParameterLoop::latitude(kTheta, 1.0, 40), 0);
    const auto n = frames.points.size();
    const auto same = apply_gauge(frames, GaugeAssignment::constant(n, 1.0));
    for (std::size_t k = 0; k < n; ++k) CHECK(distance(same.frames[k].right, frames.frames[k].right) == 0.0);

    // A constant factor cancels in every overlap, not only around the loop.
    const auto two = holonomy_from_frames(apply_gauge(frames, GaugeAssignment::constant(n, 2.0)));
    const auto base = holonomy_from_frames(frames);
    for (std::size_t e = 0; e < base.increments.size(); ++e) CHECK(std::abs(two.increments[e] - base.increments[e]) < 1e-14);

    const auto gauged = apply_gauge(frames, GaugeAssignment::random(n, 7));
    for (const auto& f : gauged.frames) CHECK(biorthonormality_error(f) < 1e-12);

    auto zero = GaugeAssignment::constant(n, 1.0);
    zero.factors[3] = 0.0;
    CHECK(code_of([&] { apply_gauge(frames, zero); }) == ErrorCode::ZeroFactor);
}

TEST_CASE("curvature_plaquette: worked examples") {
    const auto b = curvature_plaquette(Model::dirac(1.0), {kRoot2, 0.0, 0.0}, 0, 1, 1e-3, 0);
    CHECK(std::abs(b - cplx{0.0, -0.5}) < 1e-4);
    // The numerical plaquette fixes the sign: +0.5 for band 0 at the cone axis.
    const auto c = curvature_plaquette(Model::bdg(), {0.0, 0.0, 1.0}, 0, 1, 1e-3, 0);
    CHECK(std::abs(c - 0.5) < 1e-4);
    Gen g(3);
    for (int t = 0; t < 10; ++t)
        CHECK(std::abs(curvature_plaquette(Model::dirac(0.0), g.dirac_point(1.0, 0.5, 2.0), 0, 1, 1e-3, 0)) < 1e-6);
}

TEST_CASE("property: plaquette curvature converges to the closed forms") {
    Gen g(4);
    const Model models[] = {Model::dirac(1.0), Model::bdg()};
    for (int t = 0; t < 20; ++t) {
        const bool dirac = t % 2 == 0;
        const auto& m = models[dirac ? 0 : 1];
        const Vec3 r = dirac ? g.dirac_point() : g.bdg_interior(1.0, 2.0, 0.5);
        const auto want = reference_curvature(m, r, 0);
        const auto got = curvature_vector(m, r, 1e-3, 0);
        if (dirac) {
            CHECK(testing::rel_err(got[2], want[2]) < 1e-4);
        } else {
            for (int c = 0; c < 3; ++c) CHECK(std::abs(got[c] - want[c]) < 1e-4 * std::abs(want[2]));
        }
        double err[3];
        const double hs[3] = {1e-2, 5e-3, 2.5e-3};
        for (int k = 0; k < 3; ++k) err[k] = std::abs(curvature_plaquette(m, r, 0, 1, hs[k], 0) - want[2]);
        const double order = std::log2(err[0] / err[2]) / 2.0;
        CHECK(order >= 1.8);
    }
}

TEST_CASE("curvature_plaquette: errors") {
    const auto on_ring = code_of([] { curvature_plaquette(Model::dirac(1.0), {1.0, 0.0, 0.0}, 0, 1, 1e-3, 0); });
    CHECK((on_ring == ErrorCode::NonDiagonalizable || on_ring == ErrorCode::NearDefective));
    CHECK(code_of([] { curvature_plaquette(Model::dirac(1.0), {2.0, 0.0, 0.0}, 0, 1, 1e-9, 0); }) ==
          ErrorCode::StepDegenerate);
    CHECK_THROWS(curvature_plaquette(Model::dirac(1.0), {2.0, 0.0, 0.0}, 0, 0, 1e-3, 0));
}

TEST_CASE("flux_surface: closed surfaces") {
    SUBCASE("cube far from the ring") {
        const auto f = flux_surface(Model::dirac(1.0), TriangulatedSurface::cube({3.0, 0.0, 0.0}, 0.1), 0);
        CHECK(std::abs(f.flux) <= 1e-6);
    }
    SUBCASE("random empty cubes") {
        Gen g(5);
        for (int t = 0; t < 10; ++t) {
            const Vec3 c = g.bdg_interior(1.0, 2.0, 0.3);
            const auto f = flux_surface(Model::bdg(), TriangulatedSurface::cube(c, 0.2, 3), 0);
            CHECK(std::abs(f.flux) <= 1e-6);
        }
    }
    SUBCASE("Hermitian monopole") {
        const auto f = flux_surface(Model::dirac(0.0), TriangulatedSurface::sphere({0.0, 0.0, 0.0}, 1.0, 24, 48), 0);
        CHECK(std::abs(std::abs(f.flux) - 2.0 * pi) < 1e-6);
    }
    SUBCASE("a sphere around the whole EP ring carries a unit charge") {
        const auto inside = flux_surface(Model::dirac(1.0), TriangulatedSurface::sphere({0.0, 0.0, 0.0}, 0.5, 24, 48), 0);
        CHECK(std::abs(inside.flux) <= 1e-6);
        const auto outside = flux_surface(Model::dirac(1.0), TriangulatedSurface::sphere({0.0, 0.0, 0.0}, 2.0, 24, 48), 0);
        CHECK(std::abs(std::abs(outside.flux) - 2.0 * pi) < 1e-6);
    }
    SUBCASE("a surface pierced by the ring") {
        // Triangles around a piercing point encircle an EP and swap the bands.
        const auto s = TriangulatedSurface::cube({1.0, 0.0, 0.0}, 0.5, 3);
        CHECK(code_of([&] { flux_surface(Model::dirac(1.0), s, 0); }) == ErrorCode::BandExchange);
    }
}

TEST_CASE("flux_surface: BdG caps") {
    double last = 0.0;
    for (double frac : {0.7, 0.9, 0.95}) {
        const double theta = frac * pi / 4.0;
        const auto f = flux_surface(Model::bdg(), TriangulatedSurface::cap({0.0, 0.0, 0.0}, 1.0, theta, 64, 512), 0);
        const double want = bdg_cap_flux(theta);
        CHECK(std::abs(f.flux - want) <= 1e-3 * want);
        CHECK(std::abs(f.flux) > last);
        last = std::abs(f.flux);
    }
}

TEST_CASE("flux_surface: surface on an EP") {
    const auto s = TriangulatedSurface::cap({0.0, 0.0, 0.0}, 1.0, pi / 4.0, 8, 8);
    CHECK(code_of([&] { flux_surface(Model::bdg(), s, 0); }) == ErrorCode::SurfaceTouchesEP);
}

TEST_CASE("auxiliary_operator_check") {
    for (const auto& [m, r] : {std::pair{Model::bdg(), Vec3{0.0, 0.0, 1.0}}, std::pair{Model::dirac(1.0), Vec3{2.0, 0.0, 0.0}}}) {
        const auto a = auxiliary_operator_check(m, r, 1e-3);
        CHECK(a.residual < 1e-5);
        CHECK(a.opposite_sign_residual > 1e-2);
        const auto coarse = auxiliary_operator_check(m, r, 2e-2);
        const auto fine = auxiliary_operator_check(m, r, 1e-2);
        CHECK(std::abs(std::log2(coarse.residual / fine.residual) - 2.0) < 0.3);
    }
}

TEST_CASE("real_phase_condition: worked examples") {
    CHECK(std::abs(real_phase_condition(Model::bdg(), {0.2, 0.1, 1.0}, 0)) < 1e-8);
    CHECK(std::abs(real_phase_condition(Model::dirac(1.0), {kRoot2, 0.0, 0.0}, 0)) > 1e-3);
    CHECK(std::abs(real_phase_condition(Model::dirac(0.0), {0.3, 1.0, -0.4}, 0)) < 1e-10);
    Gen g(6);
    for (int t = 0; t < 20; ++t) {
        CHECK(std::abs(real_phase_condition(Model::bdg(), g.bdg_interior(0.8, 2.0, 0.5), t % 2)) < 1e-8);
        CHECK(std::abs(real_phase_condition(Model::dirac(1.0), g.dirac_point(), t % 2)) > 1e-3);
    }
    CHECK(code_of([] { real_phase_condition(Model::bdg(), {1.0, 0.0, 0.5}, 0); }) == ErrorCode::ComplexSpectrum);
}

TEST_CASE("find_constant_y: worked examples") {
    Gen g(7);
    std::vector<Vec3> bdg, dirac, herm;
    for (int t = 0; t < 10; ++t) {
        bdg.push_back(g.bdg_interior(0.8, 2.0, 0.5, true));
        dirac.push_back(g.dirac_point());
        herm.push_back({g.normal(), g.normal(), g.normal()});
    }
    const auto y = find_constant_y(Model::bdg(), bdg);
    REQUIRE(y.has_value());
    CHECK(distance(y->y, pauli::z()) < 1e-8);
    CHECK(y->alphas == std::vector<int>{1, -1});
    CHECK(y->residual < 1e-8);

    CHECK_FALSE(find_constant_y(Model::dirac(1.0), dirac).has_value());

    const auto id = find_constant_y(Model::dirac(0.0), herm);
    REQUIRE(id.has_value());
    CHECK(distance(id->y, ComplexMatrix::identity(2)) < 1e-8);
    CHECK(id->alphas == std::vector<int>{1, 1});

    CHECK(code_of([&] { find_constant_y(Model::bdg(), {bdg.front()}); }) == ErrorCode::InsufficientSamples);
}
