#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "holoq/cli/app.hpp"
#include "holoq/cli/config.hpp"
#include "holoq/cli/table.hpp"
#include "holoq/cli/tasks.hpp"
#include "holoq/errors.hpp"
#include "support.hpp"

using namespace holoq;
using namespace holoq::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run holoq_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "holoq");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("holoq_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path& dir, const json& doc) {
    const auto path = dir / "job.json";
    std::ofstream(path) << doc.dump(2);
    return path;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> lines(const std::string& s) {
    auto out = split(s, '\n');
    if (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

std::string pointer_of(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ValidationError& e) {
        return e.pointer();
    }
    return "<accepted>";
}

// Random but valid job configs covering every task.
json random_config(holoq::testing::Gen& g) {
    auto vec = [&] { return json::array({g.normal(), g.normal(), g.normal()}); };
    auto num = [&] { return g.uniform(0.01, 5.0); };
    json doc;
    switch (g.index(0, 2)) {
        case 0: doc["model"] = {{"name", "dirac"}, {"s", g.uniform(-2.0, 2.0)}}; break;
        case 1: doc["model"] = {{"name", "bdg"}}; break;
        default: {
            const std::size_t n = g.index(1, 3);
            json m = json::array();
            for (std::size_t i = 0; i < n; ++i) {
                json row = json::array();
                for (std::size_t j = 0; j < n; ++j) row.push_back(json::array({g.normal(), g.normal()}));
                m.push_back(row);
            }
            doc["model"] = {{"name", "custom"}, {"dim", n}, {"terms", {{"h0", m}, {"hz", m}}}};
        }
    }
    const char* tasks[] = {"spectrum", "ep-scan", "evolve", "holonomy", "curvature", "flux", "y-find", "check-real-phase"};
    const std::string task = tasks[g.index(0, 7)];
    doc["task"] = task;
    doc["seed"] = g.index(0, 1u << 30);
    if (g.index(0, 1)) doc["numerics"] = {{"cluster_tol_rel", num() * 1e-6}, {"edge_tol", num() / 10.0}, {"max_iterations", 50}};
    doc["output"] = {{"dir", "out" + std::to_string(g.index(0, 9))}, {"plot", g.index(0, 1) ? "line" : ""}, {"timing", false}};
    json grid = {{"a_range", {-num(), num()}}, {"b_range", {-num(), num()}}, {"n", {g.index(1, 50), g.index(1, 50)}},
                 {"axes", {0, 2}}, {"origin", vec()}};
    json points = json::array({vec(), vec(), vec()});
    json path = {{"kind", "circle"}, {"center", vec()}, {"radius", num()}, {"axes", {1, 2}}};
    if (task == "spectrum" || task == "ep-scan") doc["params"] = g.index(0, 1) ? json{{"grid", grid}} : json{{"points", points}};
    if (task == "evolve")
        doc["params"] = {{"path", path}, {"total_time", num()}, {"steps", g.index(1, 1000)}, {"mode", "free"},
                         {"leakage_threshold", num() / 10.0}};
    if (task == "holonomy") doc["params"] = {{"loop", path}, {"vertices", g.index(3, 500)}, {"gauge_trials", 2}};
    if (task == "curvature") doc["params"] = {{"grid", grid}, {"plane", {2, 0}}, {"h", num() * 1e-3}};
    if (task == "flux")
        doc["params"] = {{"surface", {{"kind", "cap"}, {"center", vec()}, {"radius", num()}, {"theta_max", num() / 10.0},
                                      {"n_theta", g.index(2, 40)}, {"n_phi", g.index(3, 40)}}}};
    if (task == "y-find") doc["params"] = {{"samples", points}, {"tol", num() * 1e-6}};
    if (task == "check-real-phase") doc["params"] = {{"points", points}, {"h", num() * 1e-3}};
    return doc;
}

json ep_scan_job(std::size_t n) {
    return {{"model", {{"name", "dirac"}, {"s", 1.0}}},
            {"task", "ep-scan"},
            {"params", {{"grid", {{"a_range", {-2, 2}}, {"b_range", {-2, 2}}, {"n", {n, n}}}}}},
            {"output", {{"plot", "heatmap"}}}};
}

}  // namespace

TEST_CASE("parse_config: errors carry JSON pointers") {
    const json base = ep_scan_job(5);
    auto with = [&](auto edit) {
        json doc = base;
        edit(doc);
        return pointer_of(doc);
    };
    CHECK(pointer_of(base) == "<accepted>");
    CHECK(with([](json& d) { d["extra"] = 1; }) == "/extra");
    CHECK(with([](json& d) { d["model"]["colour"] = 1; }) == "/model/colour");
    CHECK(with([](json& d) { d["task"] = "dance"; }) == "/task");
    CHECK(with([](json& d) { d.erase("params"); }) == "/");
    CHECK(with([](json& d) { d["params"]["grid"]["n"] = {0, 4}; }) == "/params/grid/n/0");
    CHECK(with([](json& d) { d["params"]["points"] = json::array({{1, 2, 3}}); }) == "/params");
    CHECK(with([](json& d) { d["numerics"] = {{"edge_tol", -1}}; }) == "/numerics/edge_tol");
    CHECK(with([](json& d) { d["output"] = {{"plot", "pie"}}; }) == "/output/plot");
    CHECK(with([](json& d) { d["model"] = {{"name", "bdg"}, {"s", 1}}; }) == "/model");

    const json flux = {{"model", {{"name", "bdg"}}}, {"task", "flux"}, {"params", {{"surface", {{"kind", "cube"}, {"side", -1}}}}}};
    CHECK(pointer_of(flux) == "/params/surface/side");
    json band = {{"model", {{"name", "bdg"}}},
                 {"task", "holonomy"},
                 {"params", {{"loop", {{"kind", "latitude"}, {"theta", 0.3}}}, {"band", 2}}}};
    CHECK(pointer_of(band) == "/params/band");
}

TEST_CASE("property: config echo round-trips") {
    holoq::testing::Gen g(1);
    for (int t = 0; t < 300; ++t) {
        const auto doc = random_config(g);
        JobConfig cfg;
        REQUIRE_NOTHROW(cfg = parse_config(doc));
        const auto echo = to_json(cfg);
        const auto again = parse_config(json::parse(echo.dump()));
        CHECK(again == cfg);
        CHECK(to_json(again).dump() == echo.dump());
    }
}

TEST_CASE("format_number") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(2.0) == "2");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
    holoq::testing::Gen g(2);
    for (int t = 0; t < 1000; ++t) {
        const double x = g.normal() * std::pow(10.0, g.uniform(-20.0, 20.0));
        const auto s = format_number(x);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == x);
        CHECK(s.find(',') == std::string::npos);
    }
}

TEST_CASE("ResultTable: CSV layout") {
    ResultTable t({{"index", ColumnKind::integer}, {"E", ColumnKind::complex}, {"note", ColumnKind::text}});
    t.add_row({0LL, cplx{1.5, -2.0}, std::string("plain")});
    t.add_row({1LL, cplx{0.0, 0.25}, std::string("has, comma")});
    CHECK(t.flat_names() == std::vector<std::string>{"index", "E_re", "E_im", "note"});
    std::ostringstream s;
    write_csv(s, t);
    const auto rows = lines(s.str());
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "index,E_re,E_im,note");
    CHECK(rows[1] == "0,1.5,-2,plain");
    CHECK(rows[2] == "1,0,0.25,\"has, comma\"");

    try {
        t.add_row({2LL, cplx{}});
        FAIL("expected ColumnMismatch");
    } catch (const NumericalError& e) {
        CHECK(e.code() == ErrorCode::ColumnMismatch);
    }
    CHECK_THROWS_AS(t.add_row({2LL, 1.0, std::string("x")}), NumericalError);
}

TEST_CASE("emit_plotdata: gnuplot blocks") {
    ResultTable t({{"a"}, {"b"}, {"v", ColumnKind::complex}});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) t.add_row({double(i), double(j), cplx{double(i + j), -1.0}});

    std::ostringstream heat;
    emit_plotdata(heat, t, {PlotKind::heatmap, {"a", "b", "v_re"}});
    const auto h = split(heat.str(), '\n');
    CHECK(h[0] == "# a b v_re");
    CHECK(h[1] == "0 0 0");
    CHECK(h[2] == "0 1 1");
    CHECK(h[3].empty());
    CHECK(h[4] == "1 0 1");
    std::size_t blanks = 0;
    for (const auto& l : h) blanks += l.empty();
    CHECK(blanks >= 2);

    std::ostringstream line;
    emit_plotdata(line, t, {PlotKind::line, {"a", "v_im"}});
    for (const auto& l : lines(line.str()))
        if (l[0] != '#') CHECK(split(l, ' ').size() == 2);

    std::ostringstream field;
    emit_plotdata(field, t, {PlotKind::field, {"a", "b", "v_re", "v_im"}});
    CHECK(split(lines(field.str())[1], ' ').size() == 4);

    const auto code = [&](PlotSpec spec) {
        std::ostringstream o;
        try {
            emit_plotdata(o, t, spec);
        } catch (const NumericalError& e) {
            return e.code();
        }
        return ErrorCode::NoConvergence;
    };
    CHECK(code({PlotKind::heatmap, {"a", "b"}}) == ErrorCode::ColumnMismatch);
    CHECK(code({PlotKind::line, {"a", "missing"}}) == ErrorCode::ColumnMismatch);
    CHECK(parse_plot_kind("field") == PlotKind::field);
}

TEST_CASE("holoq validate") {
    const auto dir = scratch("validate");
    auto r = holoq_cli({"validate", write_config(dir, ep_scan_job(5)).string()});
    CHECK(r.code == exit_ok);
    const auto echo = json::parse(r.out);
    CHECK(parse_config(echo) == parse_config(ep_scan_job(5)));

    json bad = ep_scan_job(5);
    bad["params"]["grid"]["a_range"] = {2, -2};
    r = holoq_cli({"validate", write_config(dir, bad).string()});
    CHECK(r.code == exit_validation);
    const auto diag = json::parse(lines(r.err).front());
    CHECK(diag["pointer"] == "/params/grid/a_range");
    CHECK(diag["exit_code"] == 2);

    r = holoq_cli({"validate", (dir / "absent.json").string()});
    CHECK(r.code == exit_validation);
    std::ofstream(dir / "broken.json") << "{ nope";
    CHECK(holoq_cli({"validate", (dir / "broken.json").string()}).code == exit_validation);
    CHECK(holoq_cli({"frobnicate"}).code == exit_validation);
    CHECK(holoq_cli({"run"}).code == exit_validation);
}

TEST_CASE("holoq run: ep-scan of the Dirac plane") {
    const auto dir = scratch("ep");
    const auto r = holoq_cli({"run", write_config(dir, ep_scan_job(101)).string(), "--out", (dir / "out").string()});
    REQUIRE(r.code == exit_ok);
    const auto csv = lines(slurp(dir / "out" / "ep-scan.csv"));
    REQUIRE(csv.size() == 101 * 101 + 1);
    const auto header = split(csv[0], ',');
    const auto col = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
    };
    const std::size_t px = col("p_x"), py = col("p_y"), diag = col("diagonalizable");
    REQUIRE(diag < header.size());
    std::size_t defective = 0;
    for (std::size_t i = 1; i < csv.size(); ++i) {
        const auto f = split(csv[i], ',');
        const double rho = std::hypot(std::stod(f[px]), std::stod(f[py]));
        const bool near_ring = std::abs(rho - 1.0) <= 1e-6;
        CHECK((f[diag] == "0") == near_ring);
        defective += f[diag] == "0";
    }
    CHECK(defective >= 4);

    const auto dat = slurp(dir / "out" / "ep-scan.dat");
    CHECK(dat.find("\n\n") != std::string::npos);
    const auto doc = json::parse(slurp(dir / "out" / "ep-scan.json"));
    for (const char* key : {"config", "result", "diagnostics", "version"}) CHECK(doc.contains(key));
    CHECK(doc.size() == 4);
    CHECK(doc["result"]["non_diagonalizable"] == defective);
    CHECK(parse_config(doc["config"]).spectrum == parse_config(ep_scan_job(101)).spectrum);
}

TEST_CASE("holoq run: holonomy job") {
    const auto dir = scratch("holonomy");
    const json job = {{"model", {{"name", "dirac"}, {"s", 1.0}}},
                      {"task", "holonomy"},
                      {"params", {{"loop", {{"kind", "circle"}, {"center", {2, 0, 0}}, {"radius", 0.5}}}, {"vertices", 400}}}};
    const auto r = holoq_cli({"run", write_config(dir, job).string(), "--out", dir.string()});
    REQUIRE(r.code == exit_ok);
    const auto res = json::parse(slurp(dir / "holonomy.json"))["result"];
    CHECK(std::abs(res["beta_re"].get<double>()) < 1e-6);
    // Band 0 picks up the flux of -i s / (2 (rho^2 - s^2)^{3/2}).
    CHECK(res["beta_im"].get<double>() < -0.08);
    CHECK(res["gauge_checksum"].get<double>() <= 1e-10);
    const auto csv = lines(slurp(dir / "holonomy.csv"));
    CHECK(csv.size() == 401);
    CHECK(csv[0].find("increment_re,increment_im") != std::string::npos);
}

TEST_CASE("holoq run: numerical failure in an evolve job") {
    const auto dir = scratch("evolve");
    const json job = {{"model", {{"name", "bdg"}}},
                      {"task", "evolve"},
                      {"params",
                       {{"path", {{"kind", "line"}, {"from", {0, 0, 1}}, {"to", {2.05, 0, 0.5}}}}, {"total_time", 10}, {"steps", 100}}}};
    const auto r = holoq_cli({"run", write_config(dir, job).string(), "--out", dir.string()});
    CHECK(r.code == exit_numerical);
    const auto diag = json::parse(lines(r.err).front());
    CHECK(diag["code"] == "ComplexSpectrum");
    CHECK(diag["exit_code"] == 3);
    CHECK(diag["message"].get<std::string>().find("sample ") != std::string::npos);
    REQUIRE(diag["where"].is_array());
    const double x = diag["where"][0], z = diag["where"][2];
    CHECK(x * x > z * z);
    CHECK_FALSE(fs::exists(dir / "evolve.json"));
}

TEST_CASE("holoq run: outputs do not depend on the worker count") {
    const auto dir = scratch("determinism");
    const std::vector<json> jobs = {
        ep_scan_job(31),
        {{"model", {{"name", "dirac"}, {"s", 1.0}}},
         {"task", "curvature"},
         {"params", {{"grid", {{"a_range", {-2, 2}}, {"b_range", {-2, 2}}, {"n", {11, 11}}}}}},
         {"output", {{"plot", "field"}}}},
        {{"model", {{"name", "bdg"}}},
         {"task", "flux"},
         {"params", {{"surface", {{"kind", "cap"}, {"radius", 1.0}, {"theta_max", 0.6}, {"n_theta", 16}, {"n_phi", 32}}}}}},
        {{"model", {{"name", "bdg"}}},
         {"task", "holonomy"},
         {"seed", 42},
         {"params", {{"loop", {{"kind", "latitude"}, {"theta", 0.39}, {"radius", 1.0}}}, {"vertices", 100}}},
         {"output", {{"plot", "line"}}}},
    };
    for (const auto& job : jobs) {
        const auto cfg = write_config(dir, job);
        const auto out = dir / "out";
        REQUIRE(holoq_cli({"run", cfg.string(), "--jobs", "1", "--out", out.string()}).code == exit_ok);
        std::map<std::string, std::string> first;
        for (const auto& e : fs::directory_iterator(out)) first[e.path().filename().string()] = slurp(e.path());
        fs::remove_all(out);
        REQUIRE(holoq_cli({"run", cfg.string(), "--jobs", "4", "--out", out.string()}).code == exit_ok);
        std::size_t compared = 0;
        for (const auto& e : fs::directory_iterator(out)) {
            CHECK(first.at(e.path().filename().string()) == slurp(e.path()));
            ++compared;
        }
        CHECK(compared == first.size());
        fs::remove_all(out);
    }
}

TEST_CASE("holoq run: every task writes its artifacts") {
    const auto dir = scratch("tasks");
    const std::vector<json> jobs = {
        {{"model", {{"name", "bdg"}}}, {"task", "spectrum"}, {"params", {{"points", {{0, 0, 1}, {1, 0, 0.5}}}}}},
        {{"model", {{"name", "dirac"}, {"s", 1.0}}},
         {"task", "evolve"},
         {"params", {{"path", {{"kind", "circle"}, {"center", {2, 0, 0}}, {"radius", 0.5}}}, {"total_time", 100}, {"steps", 400}}}},
        {{"model", {{"name", "bdg"}}}, {"task", "y-find"}, {"params", {{"samples", {{0.1, 0.2, 1}, {-0.3, 0.1, 1.5}, {0, 0.4, 0.9}}}}}},
        {{"model", {{"name", "bdg"}}}, {"task", "check-real-phase"}, {"params", {{"points", {{0.2, 0.1, 1}}}}}},
        {{"model", {{"name", "custom"}, {"dim", 2}, {"terms", {{"hz", {{1, 0}, {0, -1}}}, {"hx", {{0, 1}, {1, 0}}}}}}},
         {"task", "holonomy"},
         {"params", {{"loop", {{"kind", "circle"}, {"center", {0, 0, 0}}, {"radius", 1.0}, {"axes", {0, 2}}}}}}},
    };
    for (const auto& job : jobs) {
        const auto r = holoq_cli({"run", write_config(dir, job).string(), "--out", dir.string()});
        CHECK(r.code == exit_ok);
        const auto stem = job["task"].get<std::string>();
        const auto doc = json::parse(slurp(dir / (stem + ".json")));
        CHECK(doc["diagnostics"].is_array());
        CHECK(doc["version"].is_string());
    }
    const auto y = json::parse(slurp(dir / "y-find.json"))["result"];
    CHECK(y["found"] == true);
    // A Hermitian custom model: a loop in the x-z plane around the origin gives a real phase pi.
    const auto h = json::parse(slurp(dir / "holonomy.json"))["result"];
    CHECK(std::abs(std::abs(h["beta_re"].get<double>()) - holoq::testing::pi) < 1e-3);
}
