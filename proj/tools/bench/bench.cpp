// Serial reference kernels against their OpenMP counterparts.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "holoq/geometry.hpp"
#include "holoq/scan.hpp"

using namespace holoq;

namespace {

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void line(const char* name, double serial, double parallel, bool same) {
    std::printf("%-18s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   %s\n", name, serial, parallel, serial / parallel,
                same ? "identical" : "MISMATCH");
}

bool same_spectra(const std::vector<SpectrumPoint>& a, const std::vector<SpectrumPoint>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].eigenvalues != b[i].eigenvalues || a[i].report.diagonalizable != b[i].report.diagonalizable) return false;
    return true;
}

bool same_field(const std::vector<CurvaturePoint>& a, const std::vector<CurvaturePoint>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].status != b[i].status) return false;
        if (!a[i].status && a[i].b != b[i].b) return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 201;
    std::printf("workers: %d, grid %zux%zu\n", available_workers(), n, n);

    const auto dirac = Model::dirac(1.0);
    Grid2D grid;
    grid.a_min = grid.b_min = -2.0;
    grid.a_max = grid.b_max = 2.0;
    grid.na = grid.nb = n;
    const auto points = grid.points();

    const ParallelOptions serial{Execution::serial, 1};
    const ParallelOptions parallel{};

    std::vector<SpectrumPoint> s1, s2;
    const double ts = seconds([&] { s1 = ep_scan_serial(dirac, points); });
    const double tp = seconds([&] { s2 = ep_scan(dirac, points, {}, parallel); });
    line("ep_scan", ts, tp, same_spectra(s1, s2));

    GeometryOptions go;
    std::vector<CurvaturePoint> c1, c2;
    const double cs = seconds([&] { c1 = curvature_field_serial(dirac, points, 0, 1, 1e-3, 0, go); });
    const double cp = seconds([&] { c2 = curvature_field(dirac, points, 0, 1, 1e-3, 0, go); });
    line("curvature_field", cs, cp, same_field(c1, c2));

    const auto bdg = Model::bdg();
    const auto cap = TriangulatedSurface::cap({0.0, 0.0, 0.0}, 1.0, 0.9 * 0.7853981633974483, n / 2, n);
    GeometryOptions fs = go, fp = go;
    fs.parallel = serial;
    fp.parallel = parallel;
    FluxResult f1, f2;
    const double fts = seconds([&] { f1 = flux_surface(bdg, cap, 0, fs); });
    const double ftp = seconds([&] { f2 = flux_surface(bdg, cap, 0, fp); });
    line("flux_surface", fts, ftp, f1.flux == f2.flux);
    return 0;
}
