#include "holoq/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "holoq/scan.hpp"

namespace holoq::cli {

using nlohmann::json;

namespace {

std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out += c;
    }
    return out;
}

// A JSON value together with its pointer, for error reporting.
struct Node {
    const json& value;
    std::string ptr;

    [[noreturn]] void fail(const std::string& msg) const { throw ValidationError(ptr.empty() ? "/" : ptr, msg); }

    Node child(const std::string& key) const { return {value.at(key), ptr + "/" + escape(key)}; }
    Node element(std::size_t i) const { return {value.at(i), ptr + "/" + std::to_string(i)}; }
    bool has(const std::string& key) const { return value.contains(key); }

    void require_object(const std::set<std::string>& allowed) const {
        if (!value.is_object()) fail("expected an object");
        for (const auto& [k, v] : value.items())
            if (!allowed.count(k)) throw ValidationError(ptr + "/" + escape(k), "unknown key '" + k + "'");
    }

    double number() const {
        if (!value.is_number()) fail("expected a number");
        const double x = value.get<double>();
        if (!std::isfinite(x)) fail("expected a finite number");
        return x;
    }

    double positive() const {
        const double x = number();
        if (!(x > 0.0)) fail("expected a positive number");
        return x;
    }

    std::size_t count(std::size_t min = 0) const {
        if (!value.is_number_integer() || value.get<long long>() < 0) fail("expected a non-negative integer");
        const auto n = value.get<std::size_t>();
        if (n < min) fail("expected an integer >= " + std::to_string(min));
        return n;
    }

    int axis() const {
        const auto a = count();
        if (a > 2) fail("axis must be 0, 1 or 2");
        return static_cast<int>(a);
    }

    bool boolean() const {
        if (!value.is_boolean()) fail("expected true or false");
        return value.get<bool>();
    }

    std::string string(const std::set<std::string>& choices = {}) const {
        if (!value.is_string()) fail("expected a string");
        auto s = value.get<std::string>();
        if (!choices.empty() && !choices.count(s)) {
            std::string list;
            for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
            fail("'" + s + "' is not one of: " + list);
        }
        return s;
    }

    Vec3 vec3() const {
        if (!value.is_array() || value.size() != 3) fail("expected an array of 3 numbers");
        return {element(0).number(), element(1).number(), element(2).number()};
    }

    std::array<double, 2> pair() const {
        if (!value.is_array() || value.size() != 2) fail("expected an array of 2 numbers");
        return {element(0).number(), element(1).number()};
    }

    std::array<double, 2> range() const {
        auto r = pair();
        if (!(r[1] >= r[0])) fail("range must be [min, max] with max >= min");
        return r;
    }

    std::array<int, 2> axes() const {
        if (!value.is_array() || value.size() != 2) fail("expected two axis indices");
        std::array<int, 2> a{element(0).axis(), element(1).axis()};
        if (a[0] == a[1]) fail("axes must differ");
        return a;
    }

    cplx complex() const {
        if (value.is_number()) return {number(), 0.0};
        if (!value.is_array() || value.size() != 2) fail("expected a complex number as [re, im]");
        return {element(0).number(), element(1).number()};
    }

    std::vector<Vec3> points() const {
        if (!value.is_array() || value.empty()) fail("expected a non-empty array of [x, y, z] points");
        std::vector<Vec3> out;
        for (std::size_t i = 0; i < value.size(); ++i) out.push_back(element(i).vec3());
        return out;
    }

    ComplexMatrix matrix(std::size_t n) const {
        if (!value.is_array() || value.size() != n) fail("expected " + std::to_string(n) + " rows");
        ComplexMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = element(i);
            if (!row.value.is_array() || row.value.size() != n) row.fail("expected " + std::to_string(n) + " entries");
            for (std::size_t j = 0; j < n; ++j) m(i, j) = row.element(j).complex();
        }
        return m;
    }
};

template <class T, class F>
void optional_field(const Node& obj, const std::string& key, T& target, F&& read) {
    if (obj.has(key)) target = read(obj.child(key));
}

ModelConfig parse_model(const Node& node) {
    node.require_object({"name", "s", "dim", "terms"});
    if (!node.has("name")) node.fail("missing required key 'name'");
    ModelConfig m;
    m.name = node.child("name").string({"dirac", "bdg", "custom"});
    if (m.name == "dirac") {
        optional_field(node, "s", m.s, [](const Node& n) { return n.number(); });
        if (node.has("dim") || node.has("terms")) node.fail("'dim' and 'terms' apply to custom models only");
    } else if (m.name == "bdg") {
        if (node.has("s") || node.has("dim") || node.has("terms")) node.fail("the bdg model takes no constants");
        m.s = 0.0;
    } else {
        m.s = 0.0;
        if (node.has("s")) node.fail("'s' applies to the dirac model only");
        if (!node.has("dim")) node.fail("custom model needs 'dim'");
        m.dim = node.child("dim").count(1);
        if (m.dim > 64) node.child("dim").fail("dim must be at most 64");
        if (!node.has("terms")) node.fail("custom model needs 'terms'");
        const auto terms = node.child("terms");
        terms.require_object({"h0", "hx", "hy", "hz"});
        for (const char* key : {"h0", "hx", "hy", "hz"})
            m.terms.push_back(terms.has(key) ? terms.child(key).matrix(m.dim) : ComplexMatrix(m.dim));
    }
    return m;
}

NumericsConfig parse_numerics(const Node& node) {
    node.require_object({"cluster_tol_rel", "rank_tol", "gap_floor_rel", "reality_tol", "eig_tol", "max_iterations", "edge_tol"});
    NumericsConfig n;
    auto pos = [](const Node& x) { return x.positive(); };
    optional_field(node, "cluster_tol_rel", n.cluster_tol_rel, pos);
    optional_field(node, "rank_tol", n.rank_tol, pos);
    optional_field(node, "gap_floor_rel", n.gap_floor_rel, pos);
    optional_field(node, "reality_tol", n.reality_tol, pos);
    optional_field(node, "eig_tol", n.eig_tol, pos);
    optional_field(node, "edge_tol", n.edge_tol, pos);
    optional_field(node, "max_iterations", n.max_iterations, [](const Node& x) { return static_cast<int>(x.count(1)); });
    return n;
}

GridConfig parse_grid(const Node& node) {
    node.require_object({"axes", "a_range", "b_range", "n", "origin"});
    GridConfig g;
    optional_field(node, "axes", g.axes, [](const Node& x) { return x.axes(); });
    optional_field(node, "a_range", g.a_range, [](const Node& x) { return x.range(); });
    optional_field(node, "b_range", g.b_range, [](const Node& x) { return x.range(); });
    optional_field(node, "origin", g.origin, [](const Node& x) { return x.vec3(); });
    if (node.has("n")) {
        const auto n = node.child("n");
        if (!n.value.is_array() || n.value.size() != 2) n.fail("expected [na, nb]");
        g.n = {n.element(0).count(1), n.element(1).count(1)};
    }
    return g;
}

PointSet parse_point_set(const Node& params) {
    PointSet set;
    if (params.has("grid") == params.has("points")) params.fail("give exactly one of 'grid' or 'points'");
    if (params.has("grid")) set.grid = parse_grid(params.child("grid"));
    if (params.has("points")) set.points = params.child("points").points();
    return set;
}

PathConfig parse_path(const Node& node, const std::set<std::string>& kinds) {
    node.require_object({"kind", "center", "radius", "axes", "theta", "from", "to"});
    PathConfig p;
    if (!node.has("kind")) node.fail("missing required key 'kind'");
    p.kind = node.child("kind").string(kinds);
    optional_field(node, "center", p.center, [](const Node& x) { return x.vec3(); });
    optional_field(node, "radius", p.radius, [](const Node& x) { return x.positive(); });
    optional_field(node, "axes", p.axes, [](const Node& x) { return x.axes(); });
    optional_field(node, "theta", p.theta, [](const Node& x) { return x.number(); });
    optional_field(node, "from", p.from, [](const Node& x) { return x.vec3(); });
    optional_field(node, "to", p.to, [](const Node& x) { return x.vec3(); });
    return p;
}

std::size_t parse_band(const Node& params, const ModelConfig& model) {
    if (!params.has("band")) return 0;
    const auto node = params.child("band");
    const auto b = node.count();
    const std::size_t dim = model.name == "custom" ? model.dim : 2;
    if (b >= dim) node.fail("band must be below the Hamiltonian dimension " + std::to_string(dim));
    return b;
}

OutputConfig parse_output(const Node& node) {
    node.require_object({"dir", "stem", "csv", "json", "plot", "timing"});
    OutputConfig o;
    optional_field(node, "dir", o.dir, [](const Node& x) { return x.string(); });
    optional_field(node, "stem", o.stem, [](const Node& x) { return x.string(); });
    optional_field(node, "csv", o.csv, [](const Node& x) { return x.boolean(); });
    optional_field(node, "json", o.json, [](const Node& x) { return x.boolean(); });
    optional_field(node, "plot", o.plot, [](const Node& x) { return x.string({"", "heatmap", "line", "field"}); });
    optional_field(node, "timing", o.timing, [](const Node& x) { return x.boolean(); });
    if (o.dir.empty()) node.child("dir").fail("output directory must not be empty");
    if (o.stem.find('/') != std::string::npos) node.child("stem").fail("stem must be a plain file name");
    return o;
}

const std::vector<std::pair<Task, std::string>>& task_names() {
    static const std::vector<std::pair<Task, std::string>> names{
        {Task::spectrum, "spectrum"}, {Task::ep_scan, "ep-scan"},       {Task::evolve, "evolve"},
        {Task::holonomy, "holonomy"}, {Task::curvature, "curvature"},   {Task::flux, "flux"},
        {Task::y_find, "y-find"},     {Task::check_real_phase, "check-real-phase"}};
    return names;
}

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json points_json(const std::vector<Vec3>& pts) {
    json a = json::array();
    for (const auto& p : pts) a.push_back(vec_json(p));
    return a;
}

json matrix_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(row);
    }
    return rows;
}

json path_json(const PathConfig& p) {
    return {{"kind", p.kind},          {"center", vec_json(p.center)}, {"radius", p.radius},
            {"axes", {p.axes[0], p.axes[1]}}, {"theta", p.theta},      {"from", vec_json(p.from)},
            {"to", vec_json(p.to)}};
}

json point_set_json(const PointSet& s) {
    if (s.grid) {
        const auto& g = *s.grid;
        return {{"grid",
                 {{"axes", {g.axes[0], g.axes[1]}},
                  {"a_range", {g.a_range[0], g.a_range[1]}},
                  {"b_range", {g.b_range[0], g.b_range[1]}},
                  {"n", {g.n[0], g.n[1]}},
                  {"origin", vec_json(g.origin)}}}};
    }
    return {{"points", points_json(s.points)}};
}

}  // namespace

std::string to_string(Task t) {
    for (const auto& [task, name] : task_names())
        if (task == t) return name;
    return "unknown";
}

JobConfig parse_config(const json& doc) {
    const Node root{doc, ""};
    root.require_object({"model", "task", "seed", "numerics", "params", "output"});
    JobConfig cfg;
    if (!root.has("model")) root.fail("missing required key 'model'");
    cfg.model = parse_model(root.child("model"));
    if (!root.has("task")) root.fail("missing required key 'task'");
    {
        std::set<std::string> choices;
        for (const auto& [t, name] : task_names()) choices.insert(name);
        const auto name = root.child("task").string(choices);
        for (const auto& [t, n] : task_names())
            if (n == name) cfg.task = t;
    }
    if (root.has("seed")) cfg.seed = root.child("seed").count();
    if (root.has("numerics")) cfg.numerics = parse_numerics(root.child("numerics"));
    if (root.has("output")) cfg.output = parse_output(root.child("output"));
    if (cfg.output.stem.empty()) cfg.output.stem = to_string(cfg.task);

    if (!root.has("params")) root.fail("missing required key 'params'");
    const auto params = root.child("params");
    switch (cfg.task) {
        case Task::spectrum:
        case Task::ep_scan:
            params.require_object({"grid", "points"});
            cfg.spectrum = parse_point_set(params);
            break;
        case Task::evolve: {
            params.require_object({"path", "total_time", "steps", "mode", "band", "initial", "leakage_threshold"});
            auto& e = cfg.evolve;
            if (!params.has("path")) params.fail("missing required key 'path'");
            e.path = parse_path(params.child("path"), {"circle", "latitude", "line", "constant", "there_and_back"});
            if (!params.has("total_time")) params.fail("missing required key 'total_time'");
            e.total_time = params.child("total_time").positive();
            if (!params.has("steps")) params.fail("missing required key 'steps'");
            e.steps = params.child("steps").count(1);
            optional_field(params, "mode", e.mode, [](const Node& x) { return x.string({"adiabatic", "free"}); });
            e.band = parse_band(params, cfg.model);
            optional_field(params, "leakage_threshold", e.leakage_threshold, [](const Node& x) { return x.positive(); });
            if (params.has("initial")) {
                const auto init = params.child("initial");
                const std::size_t dim = cfg.model.name == "custom" ? cfg.model.dim : 2;
                if (!init.value.is_array() || init.value.size() != dim)
                    init.fail("initial state needs " + std::to_string(dim) + " components");
                for (std::size_t i = 0; i < dim; ++i) e.initial.push_back(init.element(i).complex());
                double norm = 0.0;
                for (const auto& c : e.initial) norm += std::norm(c);
                if (norm == 0.0) init.fail("initial state must be nonzero");
            }
            break;
        }
        case Task::holonomy: {
            params.require_object({"loop", "vertices", "band", "gauge_trials"});
            auto& h = cfg.holonomy;
            if (!params.has("loop")) params.fail("missing required key 'loop'");
            h.shape = parse_path(params.child("loop"), {"circle", "latitude"});
            optional_field(params, "vertices", h.vertices, [](const Node& x) { return x.count(3); });
            h.band = parse_band(params, cfg.model);
            optional_field(params, "gauge_trials", h.gauge_trials, [](const Node& x) { return static_cast<int>(x.count()); });
            break;
        }
        case Task::curvature: {
            params.require_object({"grid", "points", "plane", "h", "band"});
            auto& c = cfg.curvature;
            c.points = parse_point_set(params);
            optional_field(params, "plane", c.plane, [](const Node& x) { return x.axes(); });
            optional_field(params, "h", c.h, [](const Node& x) { return x.positive(); });
            c.band = parse_band(params, cfg.model);
            break;
        }
        case Task::flux: {
            params.require_object({"surface", "band"});
            if (!params.has("surface")) params.fail("missing required key 'surface'");
            const auto s = params.child("surface");
            s.require_object({"kind", "center", "side", "radius", "theta_max", "n", "n_theta", "n_phi"});
            auto& f = cfg.flux;
            if (!s.has("kind")) s.fail("missing required key 'kind'");
            f.kind = s.child("kind").string({"cube", "sphere", "cap"});
            optional_field(s, "center", f.center, [](const Node& x) { return x.vec3(); });
            optional_field(s, "side", f.side, [](const Node& x) { return x.positive(); });
            optional_field(s, "radius", f.radius, [](const Node& x) { return x.positive(); });
            optional_field(s, "theta_max", f.theta_max, [](const Node& x) { return x.positive(); });
            optional_field(s, "n", f.n, [](const Node& x) { return x.count(1); });
            optional_field(s, "n_theta", f.n_theta, [](const Node& x) { return x.count(2); });
            optional_field(s, "n_phi", f.n_phi, [](const Node& x) { return x.count(3); });
            f.band = parse_band(params, cfg.model);
            break;
        }
        case Task::y_find: {
            params.require_object({"samples", "tol"});
            if (!params.has("samples")) params.fail("missing required key 'samples'");
            cfg.y_find.samples = params.child("samples").points();
            if (cfg.y_find.samples.size() < 2) params.child("samples").fail("need at least 2 samples");
            optional_field(params, "tol", cfg.y_find.tol, [](const Node& x) { return x.positive(); });
            break;
        }
        case Task::check_real_phase: {
            params.require_object({"points", "band", "h"});
            if (!params.has("points")) params.fail("missing required key 'points'");
            cfg.real_phase.points = params.child("points").points();
            cfg.real_phase.band = parse_band(params, cfg.model);
            optional_field(params, "h", cfg.real_phase.h, [](const Node& x) { return x.positive(); });
            break;
        }
    }
    return cfg;
}

JobConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("", "cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("", std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json to_json(const JobConfig& cfg) {
    json model{{"name", cfg.model.name}};
    if (cfg.model.name == "dirac") model["s"] = cfg.model.s;
    if (cfg.model.name == "custom") {
        model["dim"] = cfg.model.dim;
        model["terms"] = {{"h0", matrix_json(cfg.model.terms.at(0))},
                          {"hx", matrix_json(cfg.model.terms.at(1))},
                          {"hy", matrix_json(cfg.model.terms.at(2))},
                          {"hz", matrix_json(cfg.model.terms.at(3))}};
    }
    const auto& n = cfg.numerics;
    json numerics{{"cluster_tol_rel", n.cluster_tol_rel}, {"rank_tol", n.rank_tol},       {"gap_floor_rel", n.gap_floor_rel},
                  {"reality_tol", n.reality_tol},         {"eig_tol", n.eig_tol},         {"max_iterations", n.max_iterations},
                  {"edge_tol", n.edge_tol}};
    const auto& o = cfg.output;
    json output{{"dir", o.dir}, {"stem", o.stem}, {"csv", o.csv}, {"json", o.json}, {"plot", o.plot}, {"timing", o.timing}};

    json params;
    switch (cfg.task) {
        case Task::spectrum:
        case Task::ep_scan:
            params = point_set_json(cfg.spectrum);
            break;
        case Task::evolve: {
            const auto& e = cfg.evolve;
            json initial = json::array();
            for (const auto& c : e.initial) initial.push_back(json::array({c.real(), c.imag()}));
            params = {{"path", path_json(e.path)}, {"total_time", e.total_time}, {"steps", e.steps},
                      {"mode", e.mode},            {"band", e.band},             {"initial", initial},
                      {"leakage_threshold", e.leakage_threshold}};
            if (e.initial.empty()) params.erase("initial");
            break;
        }
        case Task::holonomy:
            params = {{"loop", path_json(cfg.holonomy.shape)},
                      {"vertices", cfg.holonomy.vertices},
                      {"band", cfg.holonomy.band},
                      {"gauge_trials", cfg.holonomy.gauge_trials}};
            break;
        case Task::curvature:
            params = point_set_json(cfg.curvature.points);
            params["plane"] = {cfg.curvature.plane[0], cfg.curvature.plane[1]};
            params["h"] = cfg.curvature.h;
            params["band"] = cfg.curvature.band;
            break;
        case Task::flux: {
            const auto& f = cfg.flux;
            params = {{"surface",
                       {{"kind", f.kind},
                        {"center", vec_json(f.center)},
                        {"side", f.side},
                        {"radius", f.radius},
                        {"theta_max", f.theta_max},
                        {"n", f.n},
                        {"n_theta", f.n_theta},
                        {"n_phi", f.n_phi}}},
                      {"band", f.band}};
            break;
        }
        case Task::y_find:
            params = {{"samples", points_json(cfg.y_find.samples)}, {"tol", cfg.y_find.tol}};
            break;
        case Task::check_real_phase:
            params = {{"points", points_json(cfg.real_phase.points)}, {"band", cfg.real_phase.band}, {"h", cfg.real_phase.h}};
            break;
    }
    return {{"model", model}, {"task", to_string(cfg.task)}, {"seed", cfg.seed}, {"numerics", numerics},
            {"params", params}, {"output", output}};
}

Model make_model(const ModelConfig& cfg) {
    if (cfg.name == "dirac") return Model::dirac(cfg.s);
    if (cfg.name == "bdg") return Model::bdg();
    const auto terms = cfg.terms;
    return Model::custom("custom", cfg.dim, 3, [terms](const Vec3& r) {
        ComplexMatrix h = terms[0];
        for (int a = 0; a < 3; ++a) h += cplx{r[a], 0.0} * terms[a + 1];
        return h;
    });
}

std::vector<Vec3> expand_points(const PointSet& set) {
    if (!set.grid) return set.points;
    const auto& g = *set.grid;
    Grid2D grid;
    grid.origin = g.origin;
    grid.axis_a = g.axes[0];
    grid.axis_b = g.axes[1];
    grid.a_min = g.a_range[0];
    grid.a_max = g.a_range[1];
    grid.b_min = g.b_range[0];
    grid.b_max = g.b_range[1];
    grid.na = g.n[0];
    grid.nb = g.n[1];
    return grid.points();
}

}  // namespace holoq::cli
