#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hypiss/cli/config.hpp"

namespace hypiss::cli {

/// Process exit statuses.
inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_failed = 2;

struct RunReport {
    std::string command;
    std::string config_digest;
    std::string status;
    int exit_code = exit_error;
    std::string message;
    std::optional<nlohmann::json> certificate;
    std::vector<std::pair<std::string, double>> margins;
    double elapsed_seconds = 0.0;
    /// Files actually written, relative to the output directory.
    std::vector<std::string> files;
    /// Command-specific summary values.
    nlohmann::json details = nlohmann::json::object();

    [[nodiscard]] nlohmann::json to_json() const;
};

struct CommandOptions {
    std::optional<std::filesystem::path> out_dir;
    /// simulate: "auto", "zero" or a certificate path. verify: the certificate path.
    std::string gain = "auto";
    double tolerance = 0.0;
    unsigned workers = 0;
};

RunReport cmd_synth(const ExperimentConfig& cfg, const CommandOptions& opts = {});
RunReport cmd_grid(const ExperimentConfig& cfg, const CommandOptions& opts = {});
RunReport cmd_simulate(const ExperimentConfig& cfg, const CommandOptions& opts = {});
RunReport cmd_verify(const ExperimentConfig& cfg, const CommandOptions& opts = {});

/// Loads the config, dispatches, converts every failure into an exit-1 report
/// and writes `<command>_report.json` into the output directory when possible.
RunReport run_command(const std::string& command, const std::filesystem::path& config_path,
                      const CommandOptions& opts = {});

/// Writes the bundled reference configs and certificate into `dir`; returns the file names.
std::vector<std::string> seed_configs(const std::filesystem::path& dir);

/// 17 significant digits, "nan" for NaN.
std::string format_number(double v);

} // namespace hypiss::cli
