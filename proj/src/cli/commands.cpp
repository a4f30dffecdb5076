#include "hypiss/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "hypiss/cli/certificate_io.hpp"
#include "hypiss/pde.hpp"

namespace hypiss::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path), path_(path) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }
    void numbers(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
        out_ << '\n';
    }
    void close() {
        out_.close();
        if (!out_) throw std::runtime_error("write failed for " + path_.string());
    }

private:
    std::ofstream out_;
    fs::path path_;
};

fs::path output_dir(const ExperimentConfig& cfg, const CommandOptions& opts) {
    fs::path dir = opts.out_dir ? *opts.out_dir : fs::path(cfg.output.directory);
    if (dir.empty()) dir = ".";
    fs::create_directories(dir);
    return dir;
}

RunReport start(const std::string& command, const ExperimentConfig& cfg) {
    RunReport r;
    r.command = command;
    r.config_digest = config_digest(cfg.document);
    return r;
}

double scalar_design(const ScalarOrGrid& s, const char* path) {
    if (!s.is_scalar()) throw SchemaError(path, "expected a scalar, got a grid");
    return *s.value;
}

control::SynthesisOptions synthesis_options(const ExperimentConfig& cfg) {
    control::SynthesisOptions o;
    o.epsilon = cfg.design.epsilon;
    return o;
}

const char* status_name(sdp::Status s) { return sdp::to_string(s).data(); }

void finish(RunReport& r, Clock::time_point t0) {
    r.elapsed_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Gain {
    linalg::Matrix K;
    std::optional<CertificateRecord> certificate;
    std::string source;
};

CertificateRecord record_of(const control::SynthesisCertificate& c, const std::string& status) {
    return certificate_from_json(certificate_to_json(c, status));
}

} // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json RunReport::to_json() const {
    json j;
    j["command"] = command;
    j["config_digest"] = config_digest;
    j["status"] = status;
    j["exit_code"] = exit_code;
    if (!message.empty()) j["message"] = message;
    if (certificate) j["certificate"] = *certificate;
    json m = json::object();
    for (const auto& [label, value] : margins) m[label] = value;
    j["margins"] = m;
    j["elapsed_seconds"] = elapsed_seconds;
    j["files"] = files;
    j["details"] = details;
    return j;
}

RunReport cmd_synth(const ExperimentConfig& cfg, const CommandOptions& opts) {
    const auto t0 = Clock::now();
    RunReport r = start("synth", cfg);
    const double mu = scalar_design(cfg.design.mu, "design.mu");
    const double alpha = scalar_design(cfg.design.alpha, "design.alpha");
    const fs::path dir = output_dir(cfg, opts);

    const control::SynthesisResult res = control::synthesize(cfg.plant, mu, alpha, synthesis_options(cfg));
    r.status = status_name(res.status);
    r.details["mu"] = mu;
    r.details["alpha"] = alpha;
    r.details["phase1_margin"] = -res.solution.phase1_slack;
    r.details["newton_steps"] = res.solution.newton_steps;
    if (!res.solution.message.empty()) r.details["solver_message"] = res.solution.message;

    if (res.certificate) {
        const auto& cert = *res.certificate;
        r.certificate = certificate_to_json(cert, r.status);
        r.margins = cert.margins;
        r.details["gamma"] = cert.iss.gamma;
        r.details["omega"] = cert.iss.omega;
        r.details["kappa"] = cert.iss.kappa;
        if (cfg.output.certificate) {
            write_json(dir / "certificate.json", *r.certificate);
            r.files.push_back("certificate.json");
        }
        r.exit_code = exit_ok;
    } else {
        // Best-effort point from the solver, labelled by constraint.
        const lmi::LmiProblem problem = control::build_synthesis_lmis(cfg.plant, mu, alpha, cfg.design.epsilon);
        const auto& cons = problem.constraints();
        for (std::size_t i = 0; i < cons.size() && i < res.solution.margins.size(); ++i) {
            r.margins.emplace_back(cons[i].label, res.solution.margins[i]);
        }
        r.message = "synthesis LMIs infeasible at mu=" + format_number(mu) + ", alpha=" + format_number(alpha);
        r.exit_code = res.status == sdp::Status::Infeasible ? exit_failed : exit_error;
    }
    finish(r, t0);
    return r;
}

RunReport cmd_grid(const ExperimentConfig& cfg, const CommandOptions& opts) {
    const auto t0 = Clock::now();
    RunReport r = start("grid", cfg);
    if (cfg.design.mu.is_scalar()) throw SchemaError("design.mu", "expected a grid {min, max, count}");
    if (cfg.design.alpha.is_scalar()) throw SchemaError("design.alpha", "expected a grid {min, max, count}");
    const fs::path dir = output_dir(cfg, opts);

    control::GridOptions go;
    go.synthesis = synthesis_options(cfg);
    go.workers = opts.workers;
    const control::FeasibilityMap map =
        control::grid_search(cfg.plant, cfg.design.mu.values(), cfg.design.alpha.values(), go);

    std::size_t feasible = 0;
    for (const auto& c : map.cells) feasible += c.feasible() ? 1 : 0;
    r.details["cells"] = map.cells.size();
    r.details["feasible_cells"] = feasible;

    if (cfg.output.feasibility_map) {
        CsvWriter csv(dir / "feasibility_map.csv", {"mu", "alpha", "status", "c", "gamma"});
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (const auto& c : map.cells) {
            csv.row({format_number(c.mu), format_number(c.alpha), status_name(c.status), format_number(c.c.value_or(nan)),
                     format_number(c.gamma.value_or(nan))});
        }
        csv.close();
        r.files.push_back("feasibility_map.csv");
    }

    if (map.best) {
        const auto& b = *map.best;
        r.status = "feasible";
        r.certificate = certificate_to_json(b, "optimal");
        r.margins = b.margins;
        r.details["best"] = {{"mu", b.mu}, {"alpha", b.alpha}, {"c", b.c}, {"gamma", b.iss.gamma}};
        if (cfg.output.certificate) {
            write_json(dir / "best_certificate.json", *r.certificate);
            r.files.push_back("best_certificate.json");
        }
        r.exit_code = exit_ok;
    } else {
        r.status = "infeasible";
        r.message = "no feasible cell in the grid";
        r.exit_code = exit_failed;
    }
    finish(r, t0);
    return r;
}

RunReport cmd_simulate(const ExperimentConfig& cfg, const CommandOptions& opts) {
    const auto t0 = Clock::now();
    RunReport r = start("simulate", cfg);
    if (!cfg.simulation) throw SchemaError("simulation", "missing simulation block");
    const fs::path dir = output_dir(cfg, opts);
    const control::Plant& plant = cfg.plant;

    Gain gain;
    gain.source = opts.gain.empty() ? "auto" : opts.gain;
    if (gain.source == "zero") {
        gain.K = linalg::Matrix(plant.m(), plant.n());
        r.details["open_loop"] = true;
    } else if (gain.source == "auto") {
        const double mu = scalar_design(cfg.design.mu, "design.mu");
        const double alpha = scalar_design(cfg.design.alpha, "design.alpha");
        const control::SynthesisResult res = control::synthesize(plant, mu, alpha, synthesis_options(cfg));
        if (!res.certificate) {
            r.status = status_name(res.status);
            r.details["phase1_margin"] = -res.solution.phase1_slack;
            r.message = "cannot synthesize a gain at mu=" + format_number(mu) + ", alpha=" + format_number(alpha);
            r.exit_code = res.status == sdp::Status::Infeasible ? exit_failed : exit_error;
            finish(r, t0);
            return r;
        }
        r.certificate = certificate_to_json(*res.certificate, status_name(res.status));
        r.margins = res.certificate->margins;
        gain.certificate = record_of(*res.certificate, status_name(res.status));
        gain.K = res.certificate->K;
        if (cfg.output.certificate) {
            write_json(dir / "certificate.json", *r.certificate);
            r.files.push_back("certificate.json");
        }
    } else {
        gain.certificate = load_certificate(gain.source);
        gain.certificate->check_against(plant);
        gain.K = gain.certificate->K;
    }
    r.details["gain_source"] = gain.source;

    pde::SimConfig sim = cfg.sim_config();
    std::optional<pde::IssBoundParams> bound;
    const pde::Field x0 = pde::sample(sim.initial, 0.0, sim.grid);
    const double x0_norm = pde::l2_norm(x0, sim.grid);
    if (gain.certificate) {
        const linalg::DiagMatrix P = linalg::invert_diag(gain.certificate->Q);
        sim.lyapunov = pde::LyapunovWeight{P, gain.certificate->mu};
        bound = pde::IssBoundParams::from_weight(P, gain.certificate->mu, gain.certificate->alpha,
                                                 gain.certificate->chi, x0_norm);
    }

    pde::Trajectory traj;
    try {
        traj = pde::simulate(plant, gain.K, sim);
    } catch (const pde::BlowUpError& e) {
        r.status = "blow_up";
        r.message = e.what();
        r.details["blow_up_time"] = e.time();
        r.exit_code = exit_error;
        finish(r, t0);
        return r;
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::size_t violations = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    std::vector<double> rhs(traj.times.size(), nan);
    if (bound) {
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            rhs[k] = pde::iss_rhs(traj.times[k], *bound, traj.disturbance_energy[k]);
            const double gap = rhs[k] - traj.l2_norms[k];
            min_gap = std::min(min_gap, gap);
            if (gap < 0.0) ++violations;
        }
    }

    if (cfg.output.norms) {
        CsvWriter csv(dir / "norms.csv", {"t", "l2_norm", "iss_rhs", "lyapunov"});
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            const double v = traj.lyapunov_values ? (*traj.lyapunov_values)[k] : nan;
            csv.numbers({traj.times[k], traj.l2_norms[k], rhs[k], v});
        }
        csv.close();
        r.files.push_back("norms.csv");
    }
    double max_control = 0.0;
    for (const auto& u : traj.control_traces) {
        for (double v : u) max_control = std::max(max_control, std::abs(v));
    }
    if (cfg.output.controls) {
        std::vector<std::string> header{"t"};
        for (std::size_t i = 0; i < plant.m(); ++i) header.push_back("u" + std::to_string(i + 1));
        CsvWriter csv(dir / "controls.csv", header);
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            std::vector<double> row{traj.times[k]};
            row.insert(row.end(), traj.control_traces[k].begin(), traj.control_traces[k].end());
            csv.numbers(row);
        }
        csv.close();
        r.files.push_back("controls.csv");
    }
    if (cfg.output.snapshots) {
        std::vector<std::string> header{"t", "z"};
        for (std::size_t i = 0; i < plant.n(); ++i) header.push_back("x" + std::to_string(i + 1));
        CsvWriter csv(dir / "snapshots.csv", header);
        for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
            const pde::Field& x = traj.snapshots[k];
            for (std::size_t j = 0; j < x.rows(); ++j) {
                std::vector<double> row{traj.times[k], sim.grid.center(j)};
                row.insert(row.end(), x.row(j).begin(), x.row(j).end());
                csv.numbers(row);
            }
        }
        csv.close();
        r.files.push_back("snapshots.csv");
    }

    r.status = "completed";
    r.exit_code = exit_ok;
    r.details["steps"] = traj.steps;
    r.details["dt"] = traj.dt;
    r.details["records"] = traj.times.size();
    r.details["initial_l2_norm"] = x0_norm;
    r.details["final_l2_norm"] = traj.l2_norms.back();
    r.details["max_abs_control"] = max_control;
    if (bound) {
        r.details["iss_violations"] = violations;
        r.details["iss_min_gap"] = min_gap;
    }
    finish(r, t0);
    return r;
}

RunReport cmd_verify(const ExperimentConfig& cfg, const CommandOptions& opts) {
    const auto t0 = Clock::now();
    RunReport r = start("verify", cfg);
    if (opts.gain.empty() || opts.gain == "auto" || opts.gain == "zero") {
        throw std::invalid_argument("verify needs a certificate file (--gain <path>)");
    }
    const CertificateRecord cert = load_certificate(opts.gain);
    const control::Plant& plant = cfg.plant;
    cert.check_against(plant);
    const double eps = cert.epsilon.value_or(cfg.design.epsilon);

    control::SynthesisValues v;
    v.Q = cert.Q;
    v.S = cert.S.value_or(linalg::DiagMatrix::identity(plant.m()));
    v.W = cert.K * cert.Q.to_matrix();
    v.gamma_hat = cert.gamma_hat;
    v.c = cert.c.value_or(cert.Q.max());
    for (const auto& [label, value] : control::synthesis_margins(plant, cert.mu, cert.alpha, eps, v)) {
        const bool needs_s = label == control::labels::boundary || label == control::labels::s_positive;
        if (needs_s && !cert.S) continue;
        if (label == control::labels::gain_bound && !cert.c) continue;
        r.margins.emplace_back(label, value);
    }

    const linalg::DiagMatrix P = linalg::invert_diag(cert.Q);
    const linalg::SymMatrix Gamma = linalg::SymMatrix::symmetrize(P * cert.gamma_hat.full() * P);
    std::optional<linalg::DiagMatrix> T_hint;
    if (cert.S && cert.S->is_positive()) T_hint = linalg::invert_diag(*cert.S);
    const control::AnalysisReport analysis =
        control::verify_analysis(plant, cert.K, P, Gamma, cert.mu, cert.chi, cert.alpha, {}, T_hint);
    r.margins.emplace_back(control::labels::analysis_boundary, analysis.margins[0]);
    r.margins.emplace_back(control::labels::analysis_disturbance, analysis.margins[1]);
    r.margins.emplace_back(control::labels::analysis_decay, analysis.margins[2]);
    r.details["T"] = analysis.T.diagonal();
    r.details["analysis_solver_status"] = status_name(analysis.solver_status);

    const control::WellPosednessConstants wp = control::wellposedness_certificate(plant, cert.K, cfg.design.delta);
    const control::WellPosednessCheck chk = control::check_wellposedness(plant, cert.K, wp);
    r.details["wellposedness"] = {{"tau", wp.tau},
                                  {"mu_wp", wp.mu_wp},
                                  {"rho", wp.rho},
                                  {"tau_slack", chk.tau_slack},
                                  {"mu_slack", chk.mu_slack},
                                  {"rho_slack", chk.rho_slack},
                                  {"contraction_slack", chk.contraction_slack},
                                  {"ok", chk.ok()}};
    const control::IssCoefficients iss = control::iss_coefficients(P, cert.mu, cert.alpha, cert.chi);
    r.details["iss"] = {{"omega", iss.omega}, {"kappa", iss.kappa}, {"gamma", iss.gamma}};
    r.details["tolerance"] = opts.tolerance;
    r.details["certificate"] = opts.gain;

    double worst = std::numeric_limits<double>::infinity();
    std::string worst_label;
    for (const auto& [label, value] : r.margins) {
        if (!(value >= worst)) {
            worst = value;
            worst_label = label;
        }
    }
    r.details["min_margin"] = worst;
    r.details["min_margin_constraint"] = worst_label;
    const bool pass = worst >= opts.tolerance;
    r.status = pass ? "verified" : "failed";
    if (!pass) r.message = "margin of " + worst_label + " is " + format_number(worst) + " < tolerance";
    r.exit_code = pass ? exit_ok : exit_failed;
    finish(r, t0);
    return r;
}

RunReport run_command(const std::string& command, const fs::path& config_path, const CommandOptions& opts) {
    const auto t0 = Clock::now();
    RunReport r;
    r.command = command;
    std::optional<fs::path> dir;
    try {
        const ExperimentConfig cfg = load_config(config_path);
        r.config_digest = config_digest(cfg.document);
        if (command == "synth") {
            r = cmd_synth(cfg, opts);
        } else if (command == "grid") {
            r = cmd_grid(cfg, opts);
        } else if (command == "simulate") {
            r = cmd_simulate(cfg, opts);
        } else if (command == "verify") {
            r = cmd_verify(cfg, opts);
        } else {
            throw std::invalid_argument("unknown command '" + command + "'");
        }
        dir = output_dir(cfg, opts);
    } catch (const SchemaError& e) {
        r.status = "schema_error";
        r.message = e.what();
        r.details["path"] = e.path();
        r.exit_code = exit_error;
    } catch (const std::exception& e) {
        r.status = "error";
        r.message = e.what();
        r.exit_code = exit_error;
    }
    if (r.status == "schema_error" || r.status == "error") finish(r, t0);

    if (!dir && opts.out_dir) {
        std::error_code ec;
        fs::create_directories(*opts.out_dir, ec);
        if (!ec) dir = *opts.out_dir;
    }
    if (dir) {
        const std::string name = command + "_report.json";
        try {
            r.files.push_back(name);
            write_json(*dir / name, r.to_json());
        } catch (const std::exception& e) {
            r.files.pop_back();
            r.message += (r.message.empty() ? "" : "; ") + std::string(e.what());
            r.exit_code = exit_error;
        }
    }
    return r;
}

std::vector<std::string> seed_configs(const fs::path& dir) {
    fs::create_directories(dir);
    const std::vector<std::pair<std::string, json>> files{
        {"reference_example.json", reference_config()},
        {"reference_grid.json", reference_grid_config()},
        {"reference_certificate.json", reference_certificate()},
    };
    std::vector<std::string> names;
    for (const auto& [name, doc] : files) {
        write_json(dir / name, doc);
        names.push_back(name);
    }
    return names;
}

} // namespace hypiss::cli
