// Acceptance checks for the reference experiment. One PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "hypiss/control.hpp"
#include "hypiss/lmi.hpp"
#include "hypiss/pde.hpp"

using namespace hypiss;
using control::Plant;
using linalg::DiagMatrix;
using linalg::Matrix;
using linalg::SymMatrix;
using linalg::Vector;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

control::SynthesisValues reference_values() {
    control::SynthesisValues v;
    v.Q = DiagMatrix(Vector{12.5, 82.0});
    v.S = DiagMatrix(Vector{1.0, 1.0});
    v.W = control::reference_gain() * v.Q.to_matrix();
    v.gamma_hat = SymMatrix::symmetrize(Matrix{{4.07, 0.2}, {0.19, 36.3}});
    v.c = 82.0;
    return v;
}

pde::SimConfig reference_sim() {
    pde::SimConfig cfg;
    cfg.grid = pde::Grid(400);
    cfg.t_final = 25.0;
    cfg.cfl = 0.9;
    cfg.disturbance = pde::SignalSpec::sinusoidal_product(5.0, {pde::Phase::Sin, pde::Phase::Cos});
    cfg.initial = pde::SignalSpec::cosine_profile(10.0, {2.0, 1.0});
    return cfg;
}

const control::SynthesisCertificate& reference_certificate() {
    static const control::SynthesisResult res = control::synthesize(control::reference_plant(), 1.0, 0.5);
    if (!res.certificate) throw std::runtime_error("reference synthesis failed");
    return *res.certificate;
}

Outcome synthesis_feasibility() {
    const auto t0 = Clock::now();
    const control::SynthesisResult res = control::synthesize(control::reference_plant(), 1.0, 0.5);
    const double elapsed = seconds_since(t0);
    if (!res.certificate) return {false, "status " + std::string(sdp::to_string(res.status))};
    const control::SynthesisCertificate& c = *res.certificate;
    const control::SynthesisValues v{c.Q, c.S, c.W, c.gamma_hat, c.c};
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& [label, m] : control::synthesis_margins(control::reference_plant(), 1.0, 0.5, c.epsilon, v))
        worst = std::min(worst, m);
    std::ostringstream s;
    s << "status=" << sdp::to_string(res.status) << " min_margin=" << worst << " time=" << elapsed << "s";
    return {worst >= 0.0 && elapsed < 5.0, s.str()};
}

Outcome reported_values_certify() {
    const Plant plant = control::reference_plant();
    const lmi::LmiProblem prob = control::build_synthesis_lmis(plant, 1.0, 0.5, 0.0);
    const control::SynthesisValues v = reference_values();
    const lmi::Point pt = v.to_point();

    const SymMatrix decay = lmi::evaluate(prob.constraint(control::labels::decay).expr, pt);
    const linalg::SymEigen e = linalg::sym_eig(decay);
    const double decay_margin = -e.values.back();
    const double dist_min = linalg::min_eig(lmi::evaluate(prob.constraint(control::labels::disturbance).expr, pt));

    const DiagMatrix P = linalg::invert_diag(v.Q);
    const SymMatrix Gamma = SymMatrix::symmetrize(P.to_matrix() * v.gamma_hat.full() * P.to_matrix());
    const control::AnalysisReport a =
        control::verify_analysis(plant, control::reference_gain(), P, Gamma, 1.0, 1.0, 0.5);

    const bool eig_ok = std::abs(e.values[0] + 38.67) <= 0.1 && std::abs(e.values[1] + 2.18) <= 0.1;
    const bool pass = eig_ok && std::abs(decay_margin - 2.18) <= 0.1 && dist_min > 0.0 && a.min_margin() >= -0.05;
    std::ostringstream s;
    s << "decay_eigs={" << e.values[0] << "," << e.values[1] << "} decay_margin=" << decay_margin
      << " disturbance_min_eig=" << dist_min << " analysis_margins={" << a.margins[0] << "," << a.margins[1] << ","
      << a.margins[2] << "}";
    return {pass, s.str()};
}

Outcome iss_coefficients() {
    const DiagMatrix P = linalg::invert_diag(DiagMatrix(Vector{12.5, 82.0}));
    const control::IssCoefficients c = control::iss_coefficients(P, 1.0, 0.5, 1.0);
    const bool pass =
        c.omega == 0.25 && std::abs(c.kappa - 4.2229) <= 1e-3 && std::abs(c.gamma - 14.930) <= 1e-3;
    std::ostringstream s;
    s.precision(8);
    s << "omega=" << c.omega << " kappa=" << c.kappa << " gamma=" << c.gamma;
    return {pass, s.str()};
}

Outcome staircase_frontier() {
    const std::vector<double> mus = control::linspace(0.25, 2.0, 10);
    const std::vector<double> alphas = control::linspace(0.1, 1.5, 10);
    const auto t0 = Clock::now();
    const control::FeasibilityMap map = control::grid_search(control::reference_plant(), mus, alphas);
    const double elapsed = seconds_since(t0);

    bool shape = true;
    std::size_t feasible = 0;
    std::size_t prev_edge = 0;
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        std::size_t edge = mus.size();
        for (std::size_t m = 0; m < mus.size(); ++m)
            if (map.cell(m, a).feasible()) {
                edge = m;
                break;
            }
        for (std::size_t m = edge; m < mus.size(); ++m) {
            if (!map.cell(m, a).feasible()) shape = false;
            ++feasible;
        }
        if (edge < prev_edge) shape = false;
        prev_edge = edge;
    }
    std::ostringstream s;
    s << "grid=10x10 feasible_cells=" << feasible << " time=" << elapsed << "s";
    return {shape && feasible > 0 && elapsed < 120.0, s.str()};
}

struct ClosedLoopRun {
    pde::Trajectory closed;
    pde::Trajectory open;
    pde::IssBoundParams bound;
};

const ClosedLoopRun& closed_loop_run() {
    static const ClosedLoopRun run = [] {
        const Plant plant = control::reference_plant();
        const control::SynthesisCertificate& cert = reference_certificate();
        pde::SimConfig cfg = reference_sim();
        const DiagMatrix P = cert.P();
        cfg.lyapunov = pde::LyapunovWeight{P, cert.mu};
        ClosedLoopRun r;
        r.closed = pde::simulate(plant, cert.K, cfg);
        cfg.lyapunov.reset();
        r.open = pde::simulate(plant, Matrix(2, 2), cfg);
        const double x0 = pde::l2_norm(pde::sample(cfg.initial, 0.0, cfg.grid), cfg.grid);
        r.bound = pde::IssBoundParams::from_weight(P, cert.mu, cert.alpha, 1.0, x0);
        return r;
    }();
    return run;
}

Outcome iss_domination() {
    const ClosedLoopRun& r = closed_loop_run();
    std::size_t violations = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < r.closed.times.size(); ++k) {
        const double gap = pde::iss_rhs(r.closed.times[k], r.bound, r.closed.disturbance_energy[k]) - r.closed.l2_norms[k];
        min_gap = std::min(min_gap, gap);
        if (gap < 0.0) ++violations;
    }
    std::ostringstream s;
    s << "records=" << r.closed.times.size() << " violations=" << violations << " min_gap=" << min_gap;
    return {violations == 0, s.str()};
}

Outcome closed_below_open() {
    const ClosedLoopRun& r = closed_loop_run();
    const double c = r.closed.l2_norms.back(), o = r.open.l2_norms.back();
    std::ostringstream s;
    s << "closed=" << c << " open=" << o;
    return {c < o, s.str()};
}

Outcome saturation_respected() {
    const ClosedLoopRun& r = closed_loop_run();
    double worst = 0.0;
    bool inside = true;
    for (const Vector& u : r.closed.control_traces)
        for (double v : u) {
            worst = std::max(worst, std::abs(v));
            if (v < -0.3 || v > 0.3) inside = false;
        }
    std::ostringstream s;
    s << "max_abs_control=" << worst;
    return {inside, s.str()};
}

double bump(double z) {
    if (z <= 0.1 || z >= 0.5) return 0.0;
    const double s = std::sin(std::numbers::pi * (z - 0.1) / 0.4);
    return s * s;
}

pde::SimConfig transport_config(std::size_t cells, double t_final) {
    std::vector<double> grid(20001);
    Vector values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = static_cast<double>(i) / static_cast<double>(grid.size() - 1);
        values[i] = bump(grid[i]);
    }
    pde::SimConfig cfg;
    cfg.grid = pde::Grid(cells);
    cfg.t_final = t_final;
    cfg.disturbance = pde::SignalSpec::zero(1);
    cfg.initial = pde::SignalSpec::tabulated(grid, {values});
    cfg.keep_snapshots = true;
    return cfg;
}

Outcome scheme_verification() {
    const Plant plant{DiagMatrix(Vector{1.0}), Matrix{{0.0}}, Matrix{{0.0}}, Matrix{{1.0}}, Vector{1.0}};
    const Matrix K{{0.0}};
    const double t = 0.3;
    std::array<double, 2> err{};
    const std::array<std::size_t, 2> cells{200, 400};
    for (std::size_t i = 0; i < 2; ++i) {
        const pde::SimConfig cfg = transport_config(cells[i], t);
        const pde::Trajectory tr = pde::simulate(plant, K, cfg);
        pde::Field exact(cells[i], 1);
        for (std::size_t j = 0; j < cells[i]; ++j) exact(j, 0) = bump(cfg.grid.center(j) - t);
        err[i] = pde::l2_norm(tr.snapshots.back() - exact, cfg.grid);
    }
    const double order = std::log2(err[0] / err[1]);

    const pde::Trajectory exit = pde::simulate(plant, K, transport_config(400, 1.2));
    const double ratio = exit.l2_norms.back() / exit.l2_norms.front();
    std::ostringstream s;
    s << "err200=" << err[0] << " err400=" << err[1] << " order=" << order << " exit_ratio=" << ratio;
    return {err[1] < err[0] && order >= 0.8 && order <= 2.2 && ratio <= 0.05, s.str()};
}

Outcome property_suites() {
    std::mt19937_64 rng(2024);
    std::ostringstream s;
    bool pass = true;

    // sector condition
    {
        std::uniform_real_distribution<double> u(-5.0, 5.0), pos(0.01, 10.0);
        const Vector umax{0.3, 0.3};
        std::size_t bad = 0;
        for (int k = 0; k < 10000; ++k) {
            const Vector nu{u(rng), u(rng)};
            if (control::sector_value(nu, umax, DiagMatrix(Vector{pos(rng), pos(rng)})) > 0.0) ++bad;
        }
        s << "sector_violations=" << bad;
        pass = pass && bad == 0;
    }
    // φ(u) = σ(u) − u holds bit-exactly; the recombination u + φ(u) is exact while |u| ≤ 2ū
    {
        std::uniform_real_distribution<double> u(-0.6, 0.6);
        const Vector umax{0.3, 0.3};
        std::size_t bad = 0;
        for (int k = 0; k < 10000; ++k) {
            const Vector x{u(rng), u(rng)};
            const Vector sat = control::saturate(x, umax);
            const Vector dz = control::deadzone(x, umax);
            for (std::size_t i = 0; i < 2; ++i)
                if (dz[i] != sat[i] - x[i] || x[i] + dz[i] != sat[i]) ++bad;
        }
        s << " identity_mismatches=" << bad;
        pass = pass && bad == 0;
    }
    // Fréchet derivative of the Lyapunov functional
    {
        std::uniform_real_distribution<double> w(0.1, 5.0);
        std::normal_distribution<double> g;
        const pde::Grid grid(200);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            pde::Field x(200, 2), h(200, 2);
            for (std::size_t j = 0; j < 200; ++j)
                for (std::size_t i = 0; i < 2; ++i) {
                    x(j, i) = g(rng);
                    h(j, i) = g(rng);
                }
            worst = std::max(worst, pde::frechet_check(DiagMatrix(Vector{w(rng), w(rng)}), w(rng), x, h, 1e-3, grid));
        }
        s << " frechet_max_rel=" << worst;
        pass = pass && worst <= 1e-8;
    }
    // Lyapunov sandwich
    {
        std::uniform_real_distribution<double> w(0.1, 5.0);
        std::normal_distribution<double> g;
        const pde::Grid grid(200);
        std::size_t bad = 0;
        for (int k = 0; k < 100; ++k) {
            const DiagMatrix P(Vector{w(rng), w(rng)});
            const double mu = w(rng);
            pde::Field x(200, 2);
            for (std::size_t j = 0; j < 200; ++j)
                for (std::size_t i = 0; i < 2; ++i) x(j, i) = g(rng);
            const double n2 = std::pow(pde::l2_norm(x, grid), 2);
            const double v = pde::lyapunov_value(x, P, mu, grid);
            if (v < std::exp(-mu) * P.min() * n2 * (1.0 - 1e-12) || v > P.max() * n2 * (1.0 + 1e-12)) ++bad;
        }
        s << " sandwich_violations=" << bad;
        pass = pass && bad == 0;
    }
    // SDP solutions re-verified through the LMI margins
    {
        const lmi::LmiProblem prob = control::build_synthesis_lmis(control::reference_plant(), 1.0, 0.5);
        const sdp::Solution sol = sdp::minimize(prob);
        double worst = std::numeric_limits<double>::infinity();
        for (double m : lmi::margins(prob, sol.point)) worst = std::min(worst, m);
        s << " sdp_reverified_min=" << worst;
        pass = pass && sol.ok() && worst >= -1e-9;
    }
    // quadrature of the initial-state norm
    {
        const pde::Grid grid(400);
        const double n = pde::l2_norm(pde::sample(pde::SignalSpec::cosine_profile(10.0, {2.0, 1.0}), 0.0, grid), grid);
        const double rel = std::abs(n / std::sqrt(300.0) - 1.0);
        s << " x0_norm_rel_err=" << rel;
        pass = pass && rel <= 0.005;
    }
    return {pass, s.str()};
}

Outcome wellposedness() {
    const Plant plant = control::reference_plant();
    const Matrix& K = reference_certificate().K;
    const control::WellPosednessConstants w = control::wellposedness_certificate(plant, K);
    const control::WellPosednessCheck c = control::check_wellposedness(plant, K, w);
    std::ostringstream s;
    s << "tau=" << w.tau << " mu_wp=" << w.mu_wp << " rho=" << w.rho << " slacks={" << c.tau_slack << ","
      << c.mu_slack << "," << c.rho_slack << "," << c.contraction_slack << "}";
    return {c.ok(), s.str()};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"synthesis feasibility at mu=1 alpha=0.5", synthesis_feasibility},
        {"reported certificate values", reported_values_certify},
        {"ISS coefficients", iss_coefficients},
        {"feasibility frontier is a staircase", staircase_frontier},
        {"dissipation bound dominates the closed-loop norm", iss_domination},
        {"closed loop ends below open loop", closed_below_open},
        {"controls stay within saturation", saturation_respected},
        {"transport scheme order and exit", scheme_verification},
        {"property suites", property_suites},
        {"well-posedness constants", wellposedness},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
