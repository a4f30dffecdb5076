#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hypiss/cli/commands.hpp"

int main(int argc, char** argv) {
    using namespace hypiss::cli;

    CLI::App app{"hypiss: saturated boundary control synthesis and simulation for hyperbolic systems"};
    app.require_subcommand(0, 1);

    bool seed = false;
    std::string seed_dir = ".";
    app.add_flag("--seed-configs", seed, "Write the bundled reference configs into the working directory (or --out)");
    app.add_option("--out", seed_dir, "Directory for --seed-configs");

    std::string config;
    std::string out;
    CommandOptions opts;
    const char* commands[][2] = {
        {"synth", "Synthesize a gain at scalar (mu, alpha)"},
        {"grid", "Sweep the (mu, alpha) grid and write the feasibility map"},
        {"simulate", "Simulate the closed loop and write norm and control traces"},
        {"verify", "Recompute every margin of a certificate"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "Experiment config (JSON)")->required();
        sub->add_option("--out", out, "Output directory (overrides output.directory)");
        sub->add_option("--gain", opts.gain, "Gain source: certificate path, zero or auto");
        sub->add_option("--tolerance", opts.tolerance, "Smallest accepted margin for verify");
        sub->add_option("--workers", opts.workers, "Grid worker threads (0 = all cores)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_error;
    }

    if (seed) {
        try {
            for (const auto& name : seed_configs(seed_dir)) std::cout << name << '\n';
            return exit_ok;
        } catch (const std::exception& e) {
            std::cerr << "hypiss: " << e.what() << '\n';
            return exit_error;
        }
    }

    const auto subs = app.get_subcommands();
    if (subs.empty()) {
        std::cerr << app.help();
        return exit_error;
    }
    if (!out.empty()) opts.out_dir = out;

    const RunReport report = run_command(subs.front()->get_name(), config, opts);
    std::cout << report.to_json().dump(2) << '\n';
    if (!report.message.empty() && report.exit_code != exit_ok) std::cerr << "hypiss: " << report.message << '\n';
    return report.exit_code;
}
