#include "holoq/cli/tasks.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "holoq/dynamics.hpp"
#include "holoq/scan.hpp"

namespace holoq::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

// Non-finite doubles have no JSON spelling; they become null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void put_complex(json& obj, const std::string& name, cplx z) {
    obj[name + "_re"] = number(z.real());
    obj[name + "_im"] = number(z.imag());
}

std::size_t dim_of(const JobConfig& cfg) { return cfg.model.name == "custom" ? cfg.model.dim : 2; }

std::vector<Column> coordinate_columns(const JobConfig& cfg) {
    const auto names = axis_names(cfg.model);
    return {{"index", ColumnKind::integer}, {names[0]}, {names[1]}, {names[2]}};
}

std::vector<Cell> coordinate_cells(std::size_t index, const Vec3& r) {
    return {static_cast<long long>(index), r[0], r[1], r[2]};
}

FrameOptions frame_options(const NumericsConfig& n) {
    FrameOptions f;
    f.multiplicity.cluster_tol_rel = n.cluster_tol_rel;
    f.multiplicity.rank_tol = n.rank_tol;
    f.multiplicity.eig.tol = n.eig_tol;
    f.multiplicity.eig.max_iterations = n.max_iterations;
    f.gap_floor_rel = n.gap_floor_rel;
    f.reality_tol = n.reality_tol;
    return f;
}

ParameterPath make_path(const PathConfig& p, double total_time, std::size_t steps) {
    if (p.kind == "circle") return ParameterPath::circle(p.center, p.radius, total_time, steps, p.axes[0], p.axes[1]);
    if (p.kind == "latitude") return ParameterPath::latitude(p.theta, p.radius, total_time, steps);
    if (p.kind == "line") return ParameterPath::line(p.from, p.to, total_time, steps);
    if (p.kind == "constant") return ParameterPath::constant(p.center, total_time, steps);
    return ParameterPath::there_and_back(p.from, p.to, total_time, steps);
}

ParameterLoop make_loop(const PathConfig& p, std::size_t vertices) {
    if (p.kind == "latitude") return ParameterLoop::latitude(p.theta, p.radius, vertices);
    return ParameterLoop::circle(p.center, p.radius, vertices, p.axes[0], p.axes[1]);
}

TriangulatedSurface make_surface(const SurfaceConfig& s) {
    if (s.kind == "sphere") return TriangulatedSurface::sphere(s.center, s.radius, s.n_theta, s.n_phi);
    if (s.kind == "cap") return TriangulatedSurface::cap(s.center, s.radius, s.theta_max, s.n_theta, s.n_phi);
    return TriangulatedSurface::cube(s.center, s.side, s.n);
}

// Component of the curvature vector normal to the (a, b) plane, oriented so
// that a counterclockwise (a, b) circuit is positive.
cplx normal_component(const std::array<cplx, 3>& v, int a, int b) {
    const int c = 3 - a - b;
    const bool cyclic = (b - a + 3) % 3 == 1;
    return cyclic ? v[c] : -v[c];
}

TaskOutput run_spectrum(const JobConfig& cfg, const Model& model, const ParallelOptions& par) {
    const bool classify = cfg.task == Task::ep_scan;
    const auto points = expand_points(cfg.spectrum);
    const auto fo = frame_options(cfg.numerics);
    const auto scan = ep_scan(model, points, fo.multiplicity, par, cfg.numerics.reality_tol);

    auto cols = coordinate_columns(cfg);
    for (std::size_t j = 0; j < dim_of(cfg); ++j) cols.push_back({"E" + std::to_string(j), ColumnKind::complex});
    cols.push_back({"real_spectrum", ColumnKind::integer});
    cols.push_back({"min_gap"});
    if (classify) {
        cols.push_back({"diagonalizable", ColumnKind::integer});
        cols.push_back({"clusters", ColumnKind::integer});
        cols.push_back({"eta_max", ColumnKind::integer});
        cols.push_back({"zeta_min", ColumnKind::integer});
    }

    TaskOutput out;
    out.table.emplace(cols);
    std::size_t complex_count = 0, defective = 0;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        const auto& p = scan[i];
        auto row = coordinate_cells(i, p.r);
        for (const auto& e : p.eigenvalues) row.emplace_back(e);
        row.emplace_back(static_cast<long long>(p.real_spectrum));
        row.emplace_back(p.min_gap);
        if (classify) {
            int eta_max = 0, zeta_min = std::numeric_limits<int>::max();
            for (const auto& c : p.report.clusters) {
                eta_max = std::max(eta_max, c.eta);
                zeta_min = std::min(zeta_min, c.zeta);
            }
            row.emplace_back(static_cast<long long>(p.report.diagonalizable));
            row.emplace_back(static_cast<long long>(p.report.clusters.size()));
            row.emplace_back(static_cast<long long>(eta_max));
            row.emplace_back(static_cast<long long>(zeta_min));
        }
        out.table->add_row(std::move(row));
        complex_count += !p.real_spectrum;
        defective += !p.report.diagonalizable;
    }
    out.result["points"] = scan.size();
    out.result["complex_spectrum"] = complex_count;
    if (classify) out.result["non_diagonalizable"] = defective;
    return out;
}

TaskOutput run_evolve(const JobConfig& cfg, const Model& model) {
    const auto& e = cfg.evolve;
    const auto path = make_path(e.path, e.total_time, e.steps);
    EvolutionOptions opts;
    opts.mode = e.mode == "free" ? EvolutionMode::free : EvolutionMode::adiabatic;
    opts.band = e.band;
    opts.step_overlap_tol = cfg.numerics.edge_tol;
    opts.frame = frame_options(cfg.numerics);

    CVector psi0 = e.initial;
    if (psi0.empty()) psi0 = frame_at(model, path.points.front(), opts.frame).psi(e.band);
    const auto rec = evolve_path(model, path, psi0, opts);

    const auto names = axis_names(cfg.model);
    std::vector<Column> cols{{"t"}, {names[0]}, {names[1]}, {names[2]}};
    const std::size_t n = dim_of(cfg);
    for (std::size_t j = 0; j < n; ++j) cols.push_back({"psi" + std::to_string(j), ColumnKind::complex});
    for (std::size_t j = 0; j < n; ++j) cols.push_back({"c" + std::to_string(j), ColumnKind::complex});
    cols.push_back({"pseudo_norm"});
    cols.push_back({"leakage"});

    TaskOutput out;
    out.table.emplace(cols);
    double drift = 0.0;
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
        std::vector<Cell> row{rec.times[k], rec.points[k][0], rec.points[k][1], rec.points[k][2]};
        for (const auto& z : rec.states[k]) row.emplace_back(z);
        for (const auto& z : rec.coefficients[k]) row.emplace_back(z);
        row.emplace_back(rec.pseudo_norm_trace[k]);
        row.emplace_back(rec.leakage_trace[k]);
        out.table->add_row(std::move(row));
        drift = std::max(drift, std::abs(rec.pseudo_norm_trace[k] - rec.pseudo_norm_trace.front()));
    }

    auto& r = out.result;
    r["band"] = rec.band;
    r["leakage"] = number(rec.leakage);
    put_complex(r, "dynamical_phase", rec.dynamical_phase);
    r["pseudo_norm_initial"] = number(rec.pseudo_norm_trace.front());
    r["pseudo_norm_final"] = number(rec.pseudo_norm_trace.back());
    r["pseudo_norm_drift"] = number(drift);
    try {
        r["adiabaticity_margin"] = number(adiabaticity_margin(model, path, rec.band, opts.frame));
    } catch (const NumericalError& err) {
        r["adiabaticity_margin"] = nullptr;
        out.diagnostics.push_back(error_json(err));
    }
    r["beta_re"] = nullptr;
    r["beta_im"] = nullptr;
    r["winding"] = nullptr;
    if (rec.closed) {
        try {
            const auto g = extract_geometric_phase(rec, rec.band, e.leakage_threshold);
            put_complex(r, "beta", g.beta);
            r["winding"] = g.winding;
        } catch (const NumericalError& err) {
            if (err.code() != ErrorCode::LeakageTooLarge) throw;
            out.diagnostics.push_back(error_json(err));
        }
    }
    return out;
}

TaskOutput run_holonomy(const JobConfig& cfg, const Model& model, const ParallelOptions& par) {
    const auto& h = cfg.holonomy;
    auto opts = geometry_options(cfg, par);
    opts.gauge_trials = h.gauge_trials;
    const auto loop = make_loop(h.shape, h.vertices);
    const auto res = holonomy_discrete(model, loop, h.band, opts);

    auto cols = coordinate_columns(cfg);
    cols[0].name = "edge";
    cols.push_back({"increment", ColumnKind::complex});
    cols.push_back({"cumulative", ColumnKind::complex});
    TaskOutput out;
    out.table.emplace(cols);
    cplx total{};
    for (std::size_t k = 0; k < res.increments.size(); ++k) {
        total += res.increments[k];
        auto row = coordinate_cells(k, loop.vertices[k]);
        row.emplace_back(res.increments[k]);
        row.emplace_back(total);
        out.table->add_row(std::move(row));
    }
    auto& r = out.result;
    put_complex(r, "beta", res.beta);
    r["winding"] = res.winding;
    r["gauge_checksum"] = number(res.gauge_checksum);
    r["band"] = res.band;
    r["edges"] = loop.edges();
    return out;
}

TaskOutput run_curvature(const JobConfig& cfg, const Model& model, const ParallelOptions& par) {
    const auto& c = cfg.curvature;
    const auto points = expand_points(c.points);
    const auto field = curvature_field(model, points, c.plane[0], c.plane[1], c.h, c.band, geometry_options(cfg, par));
    const bool has_ref = model.reference() != nullptr && c.band < 2;

    auto cols = coordinate_columns(cfg);
    cols.push_back({"B", ColumnKind::complex});
    if (has_ref) cols.push_back({"B_ref", ColumnKind::complex});
    cols.push_back({"status", ColumnKind::text});

    TaskOutput out;
    out.table.emplace(cols);
    std::size_t failures = 0;
    double worst_rel = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) {
        const auto& p = field[i];
        auto row = coordinate_cells(i, p.r);
        row.emplace_back(p.b);
        if (has_ref) {
            cplx ref{kNaN, kNaN};
            try {
                ref = normal_component(reference_curvature(model, p.r, c.band), c.plane[0], c.plane[1]);
            } catch (const NumericalError&) {
            }
            row.emplace_back(ref);
            if (!p.status && std::isfinite(ref.real()) && std::abs(ref) > 0.0)
                worst_rel = std::max(worst_rel, std::abs(p.b - ref) / std::abs(ref));
        }
        row.emplace_back(p.status ? std::string(holoq::to_string(*p.status)) : std::string("ok"));
        out.table->add_row(std::move(row));
        if (p.status) {
            ++failures;
            out.diagnostics.push_back({{"code", holoq::to_string(*p.status)},
                                       {"message", "curvature unavailable at point " + std::to_string(i)},
                                       {"where", vec_json(p.r)}});
        }
    }
    out.result["points"] = field.size();
    out.result["failures"] = failures;
    if (has_ref) out.result["max_relative_deviation"] = number(worst_rel);
    return out;
}

TaskOutput run_flux(const JobConfig& cfg, const Model& model, const ParallelOptions& par) {
    const auto& s = cfg.flux;
    const auto res = flux_surface(model, make_surface(s), s.band, geometry_options(cfg, par));
    TaskOutput out;
    auto& r = out.result;
    put_complex(r, "flux", res.flux);
    put_complex(r, "flux_over_2pi", res.flux / (2.0 * std::numbers::pi));
    r["triangles"] = res.triangles;
    r["winding"] = res.winding;
    r["band"] = s.band;
    return out;
}

TaskOutput run_y_find(const JobConfig& cfg, const Model& model, const ParallelOptions& par) {
    const auto found = find_constant_y(model, cfg.y_find.samples, cfg.y_find.tol, geometry_options(cfg, par));
    TaskOutput out;
    auto& r = out.result;
    r["found"] = found.has_value();
    if (!found) return out;
    json re = json::array(), im = json::array();
    for (std::size_t i = 0; i < found->y.rows(); ++i) {
        json row_re = json::array(), row_im = json::array();
        for (std::size_t j = 0; j < found->y.cols(); ++j) {
            row_re.push_back(found->y(i, j).real());
            row_im.push_back(found->y(i, j).imag());
        }
        re.push_back(row_re);
        im.push_back(row_im);
    }
    r["y_re"] = re;
    r["y_im"] = im;
    r["alphas"] = found->alphas;
    r["residual"] = number(found->residual);
    return out;
}

TaskOutput run_real_phase(const JobConfig& cfg, const Model& model, const ParallelOptions& par) {
    const auto& c = cfg.real_phase;
    const auto opts = geometry_options(cfg, par);
    const auto comps = map_indexed(
        c.points.size(), [&](std::size_t i) { return real_phase_components(model, c.points[i], c.band, c.h, opts); }, par);

    const auto names = axis_names(cfg.model);
    auto cols = coordinate_columns(cfg);
    for (const auto& n : names) cols.push_back({"dX_" + n, ColumnKind::complex});
    cols.push_back({"magnitude"});
    TaskOutput out;
    out.table.emplace(cols);
    double worst = 0.0;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        auto row = coordinate_cells(i, c.points[i]);
        double mag = 0.0;
        for (const auto& z : comps[i]) {
            row.emplace_back(z);
            mag = std::max(mag, std::abs(z));
        }
        row.emplace_back(mag);
        out.table->add_row(std::move(row));
        worst = std::max(worst, mag);
    }
    out.result["points"] = comps.size();
    out.result["max_magnitude"] = number(worst);
    return out;
}

}  // namespace

json error_json(const NumericalError& e) {
    return {{"code", holoq::to_string(e.code())},
            {"message", e.what()},
            {"where", e.where() ? vec_json(*e.where()) : json(nullptr)}};
}

std::array<std::string, 3> axis_names(const ModelConfig& model) {
    if (model.name == "dirac") return {"p_x", "p_y", "p_z"};
    return {"x", "y", "z"};
}

GeometryOptions geometry_options(const JobConfig& cfg, const ParallelOptions& par) {
    GeometryOptions g;
    g.frame = frame_options(cfg.numerics);
    g.edge_tol = cfg.numerics.edge_tol;
    g.seed = cfg.seed;
    g.parallel = par;
    return g;
}

std::optional<PlotSpec> plot_spec(const JobConfig& cfg) {
    if (cfg.output.plot.empty()) return std::nullopt;
    const auto kind = parse_plot_kind(cfg.output.plot);
    const auto names = axis_names(cfg.model);
    auto unsupported = [&]() -> ValidationError {
        return ValidationError("/output/plot", "task '" + to_string(cfg.task) + "' has no " + cfg.output.plot + " plot");
    };
    auto grid_axes = [&](const PointSet& set) -> std::pair<std::string, std::string> {
        if (!set.grid) throw ValidationError("/output/plot", cfg.output.plot + " plots need a grid");
        return {names.at(static_cast<std::size_t>(set.grid->axes[0])), names.at(static_cast<std::size_t>(set.grid->axes[1]))};
    };

    switch (cfg.task) {
        case Task::spectrum:
        case Task::ep_scan: {
            const std::string value = cfg.task == Task::ep_scan ? "diagonalizable" : "min_gap";
            if (kind == PlotKind::line) return PlotSpec{kind, {"index", "min_gap"}};
            if (kind == PlotKind::heatmap) {
                const auto [a, b] = grid_axes(cfg.spectrum);
                return PlotSpec{kind, {a, b, value}};
            }
            throw unsupported();
        }
        case Task::curvature: {
            if (kind == PlotKind::line) return PlotSpec{kind, {"index", "B_im"}};
            const auto [a, b] = grid_axes(cfg.curvature.points);
            if (kind == PlotKind::heatmap) return PlotSpec{kind, {a, b, "B_im"}};
            return PlotSpec{kind, {a, b, "B_re", "B_im"}};
        }
        case Task::evolve:
            if (kind == PlotKind::line) return PlotSpec{kind, {"t", "leakage"}};
            throw unsupported();
        case Task::holonomy:
            if (kind == PlotKind::line) return PlotSpec{kind, {"edge", "cumulative_im"}};
            throw unsupported();
        case Task::check_real_phase:
            if (kind == PlotKind::line) return PlotSpec{kind, {"index", "magnitude"}};
            throw unsupported();
        case Task::flux:
        case Task::y_find:
            throw unsupported();
    }
    throw unsupported();
}

TaskOutput run_task(const JobConfig& cfg, const ParallelOptions& par) {
    const auto model = make_model(cfg.model);
    switch (cfg.task) {
        case Task::spectrum:
        case Task::ep_scan: return run_spectrum(cfg, model, par);
        case Task::evolve: return run_evolve(cfg, model);
        case Task::holonomy: return run_holonomy(cfg, model, par);
        case Task::curvature: return run_curvature(cfg, model, par);
        case Task::flux: return run_flux(cfg, model, par);
        case Task::y_find: return run_y_find(cfg, model, par);
        case Task::check_real_phase: return run_real_phase(cfg, model, par);
    }
    return {};
}

}  // namespace holoq::cli
