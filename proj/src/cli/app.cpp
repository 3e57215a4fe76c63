#include "holoq/cli/app.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "holoq/cli/config.hpp"
#include "holoq/cli/tasks.hpp"

namespace holoq::cli {

using nlohmann::json;

namespace {

void report(std::ostream& err, int exit_code, json detail) {
    detail["status"] = "error";
    detail["exit_code"] = exit_code;
    err << detail.dump() << '\n';
}

int validation_failure(std::ostream& err, const ValidationError& e) {
    report(err, exit_validation, {{"code", "ValidationError"}, {"message", e.what()}, {"pointer", e.pointer()}});
    return exit_validation;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    f << text;
    if (!f.flush()) throw std::runtime_error("failed writing '" + path.string() + "'");
}

int do_validate(const std::string& config_path, std::ostream& out, std::ostream& err) {
    try {
        const auto cfg = load_config(config_path);
        plot_spec(cfg);
        out << to_json(cfg).dump(2) << '\n';
        return exit_ok;
    } catch (const ValidationError& e) {
        return validation_failure(err, e);
    }
}

int do_run(const std::string& config_path, int jobs, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    JobConfig cfg;
    std::optional<PlotSpec> plot;
    try {
        cfg = load_config(config_path);
        if (!out_dir.empty()) cfg.output.dir = out_dir;
        plot = plot_spec(cfg);
    } catch (const ValidationError& e) {
        return validation_failure(err, e);
    }

    ParallelOptions par;
    par.workers = jobs;
    if (jobs == 1) par.execution = Execution::serial;

    const auto start = std::chrono::steady_clock::now();
    TaskOutput result;
    try {
        result = run_task(cfg, par);
    } catch (const NumericalError& e) {
        report(err, exit_numerical, error_json(e));
        return exit_numerical;
    } catch (const std::invalid_argument& e) {
        report(err, exit_validation, {{"code", "InvalidArgument"}, {"message", e.what()}, {"pointer", "/params"}});
        return exit_validation;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    try {
        const std::filesystem::path dir(cfg.output.dir);
        std::filesystem::create_directories(dir);
        std::vector<std::string> written;
        if (cfg.output.csv && result.table) {
            std::ostringstream s;
            write_csv(s, *result.table);
            write_file(dir / (cfg.output.stem + ".csv"), s.str());
            written.push_back((dir / (cfg.output.stem + ".csv")).string());
        }
        if (plot && result.table) {
            std::ostringstream s;
            emit_plotdata(s, *result.table, *plot);
            write_file(dir / (cfg.output.stem + ".dat"), s.str());
            written.push_back((dir / (cfg.output.stem + ".dat")).string());
        }
        if (cfg.output.json) {
            if (cfg.output.timing) result.result["wall_time_s"] = wall;
            const json doc{{"config", to_json(cfg)},
                           {"result", result.result},
                           {"diagnostics", result.diagnostics},
                           {"version", HOLOQ_VERSION}};
            write_file(dir / (cfg.output.stem + ".json"), doc.dump(2) + "\n");
            written.push_back((dir / (cfg.output.stem + ".json")).string());
        }
        for (const auto& w : written) out << w << '\n';
    } catch (const NumericalError& e) {
        report(err, exit_numerical, error_json(e));
        return exit_numerical;
    } catch (const std::exception& e) {
        report(err, exit_io, {{"code", "IOError"}, {"message", e.what()}});
        return exit_io;
    }
    if (!cfg.output.timing) err << json{{"status", "ok"}, {"wall_time_s", wall}}.dump() << '\n';
    return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"holoq: non-Hermitian geometry toolkit", "holoq"};
    app.set_version_flag("--version", std::string(HOLOQ_VERSION));
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int jobs = 0;
    auto* run = app.add_subcommand("run", "Run the job described by a config file");
    run->add_option("config", config_path, "JSON job config")->required();
    run->add_option("--jobs", jobs, "Worker threads (0: all available)")->check(CLI::NonNegativeNumber);
    run->add_option("--out", out_dir, "Output directory, overrides output.dir");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a config file and print its normalised form");
    validate->add_option("config", validate_path, "JSON job config")->required();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        report(err, exit_validation, {{"code", "UsageError"}, {"message", e.what()}, {"pointer", ""}});
        return exit_validation;
    }

    if (*run) return do_run(config_path, jobs, out_dir, out, err);
    return do_validate(validate_path, out, err);
}

}  // namespace holoq::cli
