#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypiss/control.hpp"
#include "hypiss/pde.hpp"

namespace hypiss::cli {

/// Malformed configuration; `path()` names the offending JSON location.
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

/// A design parameter given either as one value or as an evenly spaced grid.
struct ScalarOrGrid {
    std::optional<double> value;
    std::optional<GridSpec> grid;

    [[nodiscard]] bool is_scalar() const noexcept { return value.has_value(); }
    [[nodiscard]] std::vector<double> values() const;
};

struct DesignBlock {
    ScalarOrGrid mu;
    ScalarOrGrid alpha;
    double epsilon = 1e-6;
    double delta = 0.01;
};

struct SimulationBlock {
    std::size_t cells = 400;
    double cfl = 0.9;
    double t_final = 25.0;
    pde::SignalSpec disturbance;
    pde::SignalSpec initial;
    std::size_t snapshot_stride = 0;
};

struct OutputBlock {
    std::string directory = ".";
    bool certificate = true;
    bool feasibility_map = true;
    bool norms = true;
    bool controls = true;
    bool snapshots = false;
};

struct ExperimentConfig {
    control::Plant plant;
    DesignBlock design;
    std::optional<SimulationBlock> simulation;
    OutputBlock output;
    /// The parsed document, kept for digests and reports.
    nlohmann::json document;

    [[nodiscard]] pde::SimConfig sim_config() const;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const pde::SignalSpec& s);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// FNV-1a over the canonical JSON dump, as 16 hex digits.
std::string config_digest(const nlohmann::json& doc);

/// The bundled two-state reference experiment (scalar μ = 1, α = 0.5).
nlohmann::json reference_config();
/// Same plant with μ ∈ [0.25, 2] × α ∈ [0.1, 1.5] on a 10×10 grid.
nlohmann::json reference_grid_config();

} // namespace hypiss::cli
