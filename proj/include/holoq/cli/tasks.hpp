#pragma once

#include <optional>

#include <json.hpp>

#include "holoq/cli/config.hpp"
#include "holoq/cli/table.hpp"
#include "holoq/errors.hpp"
#include "holoq/geometry.hpp"
#include "holoq/parallel.hpp"

namespace holoq::cli {

struct TaskOutput {
    std::optional<ResultTable> table;
    nlohmann::json result = nlohmann::json::object();
    // Non-fatal findings: per-point failures, leakage warnings.
    nlohmann::json diagnostics = nlohmann::json::array();
};

// {"code", "message", "where"} with where = [x, y, z] or null.
nlohmann::json error_json(const NumericalError& e);

// Axis labels for coordinate columns: p_x, p_y, p_z for the Dirac model, x, y, z otherwise.
std::array<std::string, 3> axis_names(const ModelConfig& model);

GeometryOptions geometry_options(const JobConfig& cfg, const ParallelOptions& par = {});

// Plot columns for the configured plot kind; ValidationError at /output/plot
// when the task has no table of that shape.
std::optional<PlotSpec> plot_spec(const JobConfig& cfg);

// Throws NumericalError on fatal numerical failures.
TaskOutput run_task(const JobConfig& cfg, const ParallelOptions& par = {});

}  // namespace holoq::cli
