#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "holoq/matrix.hpp"
#include "holoq/models.hpp"

namespace holoq::cli {

// Schema violation; `pointer` is the JSON pointer of the offending value.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string pointer, const std::string& what) : std::runtime_error(what), pointer_(std::move(pointer)) {}
    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

enum class Task { spectrum, ep_scan, evolve, holonomy, curvature, flux, y_find, check_real_phase };

std::string to_string(Task t);

struct ModelConfig {
    std::string name = "dirac";  // dirac | bdg | custom
    double s = 1.0;              // dirac only
    // custom: H(R) = h0 + x hx + y hy + z hz
    std::size_t dim = 0;
    std::vector<ComplexMatrix> terms;

    bool operator==(const ModelConfig&) const = default;
};

struct NumericsConfig {
    double cluster_tol_rel = 1e-6;
    double rank_tol = 1e-10;
    double gap_floor_rel = 1e-6;
    double reality_tol = 1e-9;
    double eig_tol = 1e-10;
    int max_iterations = 100;
    double edge_tol = 0.5;

    bool operator==(const NumericsConfig&) const = default;
};

struct GridConfig {
    std::array<int, 2> axes{0, 1};
    std::array<double, 2> a_range{-1.0, 1.0};
    std::array<double, 2> b_range{-1.0, 1.0};
    std::array<std::size_t, 2> n{2, 2};
    Vec3 origin{0.0, 0.0, 0.0};

    bool operator==(const GridConfig&) const = default;
};

// Either an explicit point list or a grid.
struct PointSet {
    std::vector<Vec3> points;
    std::optional<GridConfig> grid;

    bool operator==(const PointSet&) const = default;
};

struct PathConfig {
    std::string kind = "circle";  // circle | latitude | line | constant | there_and_back
    Vec3 center{0.0, 0.0, 0.0};
    double radius = 1.0;
    std::array<int, 2> axes{0, 1};
    double theta = 0.0;
    Vec3 from{0.0, 0.0, 0.0};
    Vec3 to{0.0, 0.0, 0.0};

    bool operator==(const PathConfig&) const = default;
};

struct EvolveConfig {
    PathConfig path;
    double total_time = 1.0;
    std::size_t steps = 1000;
    std::string mode = "adiabatic";  // adiabatic | free
    std::size_t band = 0;
    // Initial state; empty means psi_band at the first path point.
    std::vector<cplx> initial;
    double leakage_threshold = 0.05;

    bool operator==(const EvolveConfig&) const = default;
};

struct LoopConfig {
    PathConfig shape;  // circle or latitude
    std::size_t vertices = 400;
    std::size_t band = 0;
    int gauge_trials = 4;

    bool operator==(const LoopConfig&) const = default;
};

struct CurvatureConfig {
    PointSet points;
    std::array<int, 2> plane{0, 1};
    double h = 1e-3;
    std::size_t band = 0;

    bool operator==(const CurvatureConfig&) const = default;
};

struct SurfaceConfig {
    std::string kind = "cube";  // cube | sphere | cap
    Vec3 center{0.0, 0.0, 0.0};
    double side = 1.0;
    double radius = 1.0;
    double theta_max = 0.5;
    std::size_t n = 2;
    std::size_t n_theta = 40;
    std::size_t n_phi = 80;
    std::size_t band = 0;

    bool operator==(const SurfaceConfig&) const = default;
};

struct YFindConfig {
    std::vector<Vec3> samples;
    double tol = 1e-6;

    bool operator==(const YFindConfig&) const = default;
};

struct RealPhaseConfig {
    std::vector<Vec3> points;
    std::size_t band = 0;
    double h = 1e-3;

    bool operator==(const RealPhaseConfig&) const = default;
};

struct OutputConfig {
    std::string dir = ".";
    std::string stem;  // defaults to the task name
    bool csv = true;
    bool json = true;
    std::string plot;  // "", heatmap, line, field
    bool timing = false;

    bool operator==(const OutputConfig&) const = default;
};

struct JobConfig {
    ModelConfig model;
    Task task = Task::spectrum;
    std::uint64_t seed = 0;
    NumericsConfig numerics;
    OutputConfig output;

    PointSet spectrum;  // spectrum, ep-scan
    EvolveConfig evolve;
    LoopConfig holonomy;
    CurvatureConfig curvature;
    SurfaceConfig flux;
    YFindConfig y_find;
    RealPhaseConfig real_phase;

    bool operator==(const JobConfig&) const = default;
};

// Throws ValidationError with the JSON pointer of the first problem.
JobConfig parse_config(const nlohmann::json& doc);
JobConfig load_config(const std::string& path);

// Normalised echo: all defaults filled in, only the section of the chosen task.
nlohmann::json to_json(const JobConfig& cfg);

Model make_model(const ModelConfig& cfg);
std::vector<Vec3> expand_points(const PointSet& set);

}  // namespace holoq::cli
