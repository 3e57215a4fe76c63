#include <doctest.h>

#include <cmath>

#include "holoq/dynamics.hpp"
#include "holoq/geometry.hpp"
#include "support.hpp"

using namespace holoq;
using holoq::testing::Gen;
using holoq::testing::pi;

namespace {

const double kRoot2 = std::sqrt(2.0);
const double kTheta = pi / 8.0;

// s / (2 (rho^2 - s^2)^{3/2}) over the disk of radius 0.5 about (2, 0).
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

CVector start_state(const Model& m, const ParameterPath& path, std::size_t band) {
    return frame_at(m, path.points.front()).psi(band);
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

TEST_CASE("propagate_step: worked examples") {
    auto out = propagate_step(pauli::z(), pi, CVector{1.0, 0.0});
    CHECK(std::abs(out[0] + 1.0) < 1e-14);
    CHECK(std::abs(out[1]) < 1e-14);

    const ComplexMatrix gain{{I_UNIT, 0.0}, {0.0, -I_UNIT}};
    out = propagate_step(gain, 1.0, CVector{1.0 / kRoot2, 1.0 / kRoot2});
    CHECK(std::abs(out[0] - std::exp(1.0) / kRoot2) < 1e-13);
    CHECK(std::abs(out[1] - std::exp(-1.0) / kRoot2) < 1e-14);

    const auto m = Model::dirac(1.0);
    const auto f = reference_frame(m, {kRoot2, 0.0, 0.0});
    for (double dt : {0.1, 1.0, 7.3}) {
        out = propagate_step(m.hamiltonian({kRoot2, 0.0, 0.0}), dt, f.psi(0));
        CHECK(distance(out, scaled(f.psi(0), std::exp(-I_UNIT * dt))) < 1e-12);
    }
    CHECK_THROWS_AS(propagate_step(ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}, 1.0, CVector{1.0, 0.0}), NumericalError);
}

TEST_CASE("property: propagation composes") {
    Gen g(1);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = g.index(2, 5);
        const auto h = g.with_spectrum(g.real_spectrum(n));
        const auto psi = g.vector(n);
        const double a = g.uniform(0.0, 2.0);
        const double b = g.uniform(0.0, 2.0);
        const auto two = propagate_step(h, b, propagate_step(h, a, psi));
        CHECK(distance(two, propagate_step(h, a + b, psi)) < 1e-10 * norm2(psi));
    }
}

TEST_CASE("ParameterPath: construction and validation") {
    const auto c = ParameterPath::circle({2.0, 0.0, 0.0}, 0.5, 10.0, 100);
    CHECK(c.size() == 101);
    CHECK(c.closed);
    CHECK(c.points.front() == c.points.back());
    CHECK_NOTHROW(c.validate());
    const auto l = ParameterPath::line({0.0, 0.0, 1.0}, {0.0, 0.0, 2.0}, 1.0, 4);
    CHECK_FALSE(l.closed);
    CHECK(std::abs(l.at(0.5)[2] - 1.5) < 1e-14);

    ParameterPath bad = l;
    bad.times[2] = bad.times[1];
    CHECK_THROWS(bad.validate());
    bad = l;
    bad.closed = true;
    CHECK(code_of([&] { bad.validate(); }) == ErrorCode::NotClosed);
}

TEST_CASE("evolve_path: constant path keeps the band") {
    const auto m = Model::dirac(1.0);
    const auto path = ParameterPath::constant({kRoot2, 0.3, 0.0}, 50.0, 200);
    const auto rec = evolve_path(m, path, start_state(m, path, 0));
    CHECK(rec.leakage < 1e-12);
    CHECK(rec.band == 0);
    for (const auto& c : rec.coefficients) CHECK(std::abs(c[0] - 1.0) < 1e-10);
}

TEST_CASE("evolve_path: BdG latitude circle in the slow limit") {
    const auto m = Model::bdg();
    const auto path = ParameterPath::latitude(kTheta, 1.0, 1e3, 10000);
    const auto rec = evolve_path(m, path, start_state(m, path, 0));
    CHECK(rec.leakage <= 1e-2);
    CHECK(rec.closed);
    const auto phase = extract_geometric_phase(rec);
    // Im beta is 1.4e-6 at T = 1e3 and falls below 1e-7 from T = 3e3 on.
    const auto slow_path = ParameterPath::latitude(kTheta, 1.0, 1e4, 40000);
    const auto slow = extract_geometric_phase(evolve_path(m, slow_path, start_state(m, slow_path, 0)));
    CHECK(std::abs(slow.beta.imag()) < 1e-6);
    const auto geo = holonomy_discrete(m, ParameterLoop::latitude(kTheta, 1.0, 400), 0);
    CHECK(std::abs(phase.unwound - (geo.beta + 2.0 * pi * static_cast<double>(geo.winding))) < 1e-2);
}

TEST_CASE("evolve_path: Dirac loop phase is the curvature flux") {
    const auto m = Model::dirac(1.0);
    const auto path = ParameterPath::circle({2.0, 0.0, 0.0}, 0.5, 1e3, 10000);
    const auto rec = evolve_path(m, path, start_state(m, path, 0));
    const auto phase = extract_geometric_phase(rec);
    CHECK(std::abs(phase.beta.real()) < 1e-2);
    // The sign follows the closed-form curvature of band 0, -i s / (2 (rho^2 - s^2)^{3/2}).
    CHECK(std::abs(phase.beta.imag() + dirac_disk_flux()) < 1e-2);
}

TEST_CASE("evolve_path: complex spectrum") {
    const auto m = Model::bdg();
    const auto path = ParameterPath::line({0.0, 0.0, 1.0}, {1.5, 0.0, 0.4}, 10.0, 100);
    try {
        evolve_path(m, path, start_state(m, path, 0));
        FAIL("expected ComplexSpectrum");
    } catch (const NumericalError& e) {
        CHECK(e.code() == ErrorCode::ComplexSpectrum);
        REQUIRE(e.where().has_value());
        CHECK((*e.where())[0] * (*e.where())[0] > (*e.where())[2] * (*e.where())[2]);
    }

    // Free evolution inside the gain region: the growing mode takes over monotonically.
    EvolutionOptions free;
    free.mode = EvolutionMode::free;
    const auto fixed = ParameterPath::constant({1.0, 0.0, 0.5}, 5.0, 50);
    const auto f = frame_at(m, fixed.points.front());
    const auto rec = evolve_path(m, fixed, axpy(1.0, f.psi(0), f.psi(1)), free);
    const std::size_t grow = f.energies[0].imag() > f.energies[1].imag() ? 0 : 1;
    double last = 0.0;
    for (const auto& c : rec.projections) {
        const double ratio = std::abs(c[grow]) / std::abs(c[1 - grow]);
        CHECK(ratio > last);
        last = ratio;
    }
}

TEST_CASE("evolve_path: step too coarse") {
    const auto m = Model::dirac(1.0);
    // One step across the EP ring: the strongly non-orthogonal frames cannot be matched.
    const auto path = ParameterPath::line({3.0, 0.0, 0.0}, {-1.1, 0.1, 0.0}, 10.0, 1);
    CHECK(code_of([&] { evolve_path(m, path, start_state(m, path, 0)); }) == ErrorCode::StepTooCoarse);
}

TEST_CASE("adiabaticity_margin") {
    const auto d = Model::dirac(1.0);
    CHECK(adiabaticity_margin(d, ParameterPath::constant({2.0, 0.0, 0.0}, 10.0, 20), 0) < 1e-12);
    const double slow = adiabaticity_margin(d, ParameterPath::circle({2.0, 0.0, 0.0}, 0.5, 100.0, 400), 0);
    const double fast = adiabaticity_margin(d, ParameterPath::circle({2.0, 0.0, 0.0}, 0.5, 1.0, 400), 0);
    CHECK(slow < 0.05);
    CHECK(std::abs(fast / slow - 100.0) < 1.0);
    CHECK(code_of([&] { adiabaticity_margin(Model::bdg(), ParameterPath::line({0, 0, 1}, {1.5, 0, 0.4}, 1.0, 50), 0); }) ==
          ErrorCode::ComplexSpectrum);
}

TEST_CASE("extract_geometric_phase: zero-area loop and errors") {
    const auto m = Model::dirac(1.0);
    // The second-order adiabatic energy shift leaves an O(1/T) real residue
    // (about 2e-5 at T = 1e3), so the slow limit needs T = 1e5 here.
    const auto path = ParameterPath::there_and_back({2.0, 0.0, 0.0}, {2.0, 0.5, 0.0}, 1e5, 200000);
    const auto rec = evolve_path(m, path, start_state(m, path, 0));
    CHECK(std::abs(extract_geometric_phase(rec).beta) < 1e-6);

    const auto open = ParameterPath::line({2.0, 0.0, 0.0}, {2.0, 0.5, 0.0}, 10.0, 100);
    const auto rec_open = evolve_path(m, open, start_state(m, open, 0));
    CHECK(code_of([&] { extract_geometric_phase(rec_open); }) == ErrorCode::NotClosed);

    const auto fast = ParameterPath::circle({2.0, 0.0, 0.0}, 0.5, 1.0, 400);
    const auto rec_fast = evolve_path(m, fast, start_state(m, fast, 0));
    CHECK(rec_fast.leakage > 0.05);
    CHECK(code_of([&] { extract_geometric_phase(rec_fast); }) == ErrorCode::LeakageTooLarge);
    CHECK_NOTHROW(extract_geometric_phase(rec_fast, std::nullopt, 10.0));
}

TEST_CASE("conservation: pseudo-norm for fixed H") {
    Gen g(2);
    for (int t = 0; t < 5; ++t) {
        const auto m = Model::dirac(1.0);
        const Vec3 r = g.dirac_point();
        const auto path = ParameterPath::constant(r, 100.0, 10000);
        const auto rec = evolve_path(m, path, g.vector(2), {.mode = EvolutionMode::free});
        const double n0 = rec.pseudo_norm_trace.front();
        double drift = 0.0;
        for (double n : rec.pseudo_norm_trace) drift = std::max(drift, std::abs(n - n0));
        CHECK(drift <= 1e-10 * std::max(1.0, std::abs(n0)));
    }
}

TEST_CASE("conservation: BdG sigma_z norm on a moving path") {
    const auto m = Model::bdg();
    Gen g(3);
    for (int t = 0; t < 3; ++t) {
        const auto path = ParameterPath::latitude(g.uniform(0.1, 0.6), g.uniform(0.5, 2.0), g.uniform(5.0, 50.0), 2000);
        const auto psi0 = g.vector(2);
        const auto rec = evolve_path(m, path, psi0, {.mode = EvolutionMode::free});
        const auto sz = [](const CVector& v) { return std::norm(v[0]) - std::norm(v[1]); };
        const double n0 = sz(rec.states.front());
        for (const auto& s : rec.states) CHECK(std::abs(sz(s) - n0) <= 1e-8);
    }
}

TEST_CASE("property: leakage falls as 1 / T") {
    const auto m = Model::dirac(1.0);
    std::vector<double> logs;
    for (double total : {1e2, 1e3, 1e4}) {
        // dt <= 0.25 so the piecewise-constant propagator does not add its own leakage.
        const auto path = ParameterPath::circle({2.0, 0.0, 0.0}, 0.5, total, static_cast<std::size_t>(4.0 * total));
        logs.push_back(std::log10(evolve_path(m, path, start_state(m, path, 0)).leakage));
    }
    const double slope = (logs[2] - logs[0]) / 2.0;
    CHECK(std::abs(slope + 1.0) <= 0.2);
}
