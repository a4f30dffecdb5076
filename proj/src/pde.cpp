#include "hypiss/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hypiss::pde {

// ---------------------------------------------------------------------------
// Signals
// ---------------------------------------------------------------------------

SignalSpec SignalSpec::zero(std::size_t components) {
    SignalSpec s;
    s.kind = SignalKind::Zero;
    s.components = components;
    return s;
}

SignalSpec SignalSpec::sinusoidal_product(double amplitude, std::vector<Phase> phases) {
    SignalSpec s;
    s.kind = SignalKind::SinusoidalProduct;
    s.components = phases.size();
    s.amplitude = amplitude;
    s.phases = std::move(phases);
    return s;
}

SignalSpec SignalSpec::cosine_profile(double amplitude, std::vector<double> frequencies) {
    SignalSpec s;
    s.kind = SignalKind::CosineProfile;
    s.components = frequencies.size();
    s.amplitude = amplitude;
    s.frequencies = std::move(frequencies);
    return s;
}

SignalSpec SignalSpec::tabulated(std::vector<double> grid, std::vector<Vector> values) {
    SignalSpec s;
    s.kind = SignalKind::Tabulated;
    s.components = values.size();
    s.table_grid = std::move(grid);
    s.table_values = std::move(values);
    return s;
}

void SignalSpec::validate() const {
    if (!std::isfinite(amplitude)) throw ConfigError("signal amplitude must be finite");
    switch (kind) {
    case SignalKind::Zero: break;
    case SignalKind::SinusoidalProduct:
        if (phases.size() != components) throw ConfigError("sinusoidal_product: one phase per component");
        break;
    case SignalKind::CosineProfile:
        if (frequencies.size() != components) throw ConfigError("cosine_profile: one frequency per component");
        break;
    case SignalKind::Tabulated:
        if (table_grid.size() < 2) throw ConfigError("tabulated: at least two samples required");
        for (std::size_t i = 1; i < table_grid.size(); ++i)
            if (!(table_grid[i] > table_grid[i - 1])) throw ConfigError("tabulated: grid must be strictly increasing");
        if (table_grid.front() > 0.0 || table_grid.back() < 1.0) throw ConfigError("tabulated: grid must cover [0, 1]");
        if (table_values.size() != components) throw ConfigError("tabulated: one value list per component");
        for (const auto& v : table_values)
            if (v.size() != table_grid.size()) throw ConfigError("tabulated: value count must match grid");
        break;
    }
}

Vector SignalSpec::evaluate(double t, double z) const {
    Vector out(components, 0.0);
    switch (kind) {
    case SignalKind::Zero: break;
    case SignalKind::SinusoidalProduct:
        for (std::size_t i = 0; i < components; ++i)
            out[i] = amplitude * (phases[i] == Phase::Sin ? std::sin(z * t) : std::cos(z * t));
        break;
    case SignalKind::CosineProfile:
        for (std::size_t i = 0; i < components; ++i)
            out[i] = amplitude * (std::cos(2.0 * std::numbers::pi * frequencies[i] * z) - 1.0);
        break;
    case SignalKind::Tabulated: {
        auto it = std::upper_bound(table_grid.begin(), table_grid.end(), z);
        std::size_t hi = static_cast<std::size_t>(it - table_grid.begin());
        hi = std::clamp<std::size_t>(hi, 1, table_grid.size() - 1);
        const std::size_t lo = hi - 1;
        const double w = (z - table_grid[lo]) / (table_grid[hi] - table_grid[lo]);
        for (std::size_t i = 0; i < components; ++i)
            out[i] = (1.0 - w) * table_values[i][lo] + w * table_values[i][hi];
        break;
    }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Grid / config
// ---------------------------------------------------------------------------

Grid::Grid(std::size_t cells) : cells_(cells) {
    if (cells < 8) throw ConfigError("grid needs at least 8 cells");
}

void SimConfig::validate(const Plant& plant) const {
    plant.validate();
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be positive and finite");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
    disturbance.validate();
    initial.validate();
    if (disturbance.dim() != plant.q()) throw ConfigError("disturbance must have q components");
    if (initial.dim() != plant.n()) throw ConfigError("initial condition must have n components");
    if (lyapunov) {
        if (lyapunov->P.dim() != plant.n() || !lyapunov->P.is_positive()) {
            throw ConfigError("Lyapunov weight P must be positive diagonal n x n");
        }
        if (!(lyapunov->mu > 0.0)) throw ConfigError("Lyapunov weight mu must be positive");
    }
}

double max_time_step(const Plant& plant, const Grid& grid, double cfl) { return cfl * grid.dz() / plant.lambda.max(); }

Field sample(const SignalSpec& spec, double t, const Grid& grid) {
    Field f(grid.cells(), spec.dim());
    for (std::size_t j = 0; j < grid.cells(); ++j) {
        const Vector v = spec.evaluate(t, grid.center(j));
        for (std::size_t i = 0; i < v.size(); ++i) f(j, i) = v[i];
    }
    return f;
}

// ---------------------------------------------------------------------------
// Scheme
// ---------------------------------------------------------------------------

Field step(const Field& state, const Plant& plant, const Matrix& K, double t, double dt, const SimConfig& config) {
    const Grid& grid = config.grid;
    const std::size_t cells = grid.cells();
    const std::size_t n = plant.n();
    const double dz = grid.dz();
    if (state.rows() != cells || state.cols() != n) throw ConfigError("step: state shape does not match grid/plant");
    if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
    if (plant.lambda.max() * dt / dz > 1.0 + 1e-12) throw ConfigError("step: CFL condition violated");

    const Vector outflow(state.row(cells - 1).begin(), state.row(cells - 1).end());
    const Vector inflow = control::closed_loop_boundary(plant, K, outflow);

    // Extended state: index 0 is the inflow ghost, index cells+1 the outflow ghost.
    auto ext = [&](std::size_t k, std::size_t i) {
        if (k == 0) return inflow[i];
        if (k == cells + 1) return outflow[i];
        return state(k - 1, i);
    };

    const double half_ratio = 0.5 * dt / dz;
    const double t_half = t + 0.5 * dt;
    // Interface k sits at z = k·dz, between extended cells k and k+1.
    Matrix half(cells + 1, n);
    for (std::size_t k = 0; k <= cells; ++k) {
        const Vector src = plant.N * config.disturbance.evaluate(t_half, static_cast<double>(k) * dz);
        for (std::size_t i = 0; i < n; ++i) {
            const double left = ext(k, i);
            const double right = ext(k + 1, i);
            half(k, i) = 0.5 * (left + right) - half_ratio * plant.lambda[i] * (right - left) + 0.5 * dt * src[i];
        }
    }

    const double ratio = dt / dz;
    Field next(cells, n);
    for (std::size_t j = 0; j < cells; ++j) {
        const Vector src = plant.N * config.disturbance.evaluate(t_half, grid.center(j));
        for (std::size_t i = 0; i < n; ++i) {
            next(j, i) = state(j, i) - ratio * plant.lambda[i] * (half(j + 1, i) - half(j, i)) + dt * src[i];
        }
    }
    return next;
}

namespace {

double disturbance_energy_density(const SignalSpec& spec, double t, const Grid& grid) {
    if (spec.kind == SignalKind::Zero) return 0.0;
    double s = 0.0;
    for (std::size_t j = 0; j < grid.cells(); ++j) {
        const Vector d = spec.evaluate(t, grid.center(j));
        s += linalg::dot(d, d);
    }
    return s * grid.dz();
}

} // namespace

Trajectory simulate(const Plant& plant, const Matrix& K, const SimConfig& config) {
    config.validate(plant);
    if (K.rows() != plant.m() || K.cols() != plant.n()) throw ConfigError("simulate: K must be m x n");

    const double dt_max = max_time_step(plant, config.grid, config.cfl);
    const auto steps = static_cast<std::size_t>(std::ceil(config.t_final / dt_max - 1e-12));
    const double dt = config.t_final / static_cast<double>(steps);
    const std::size_t stride =
        config.snapshot_stride != 0 ? config.snapshot_stride : std::max<std::size_t>(1, (steps + 1997) / 1998);

    Trajectory traj;
    traj.dt = dt;
    traj.steps = steps;
    if (config.lyapunov) traj.lyapunov_values.emplace();

    double prev_density = 0.0;
    auto record = [&](const Field& x, double t) {
        const std::size_t last = x.rows() - 1;
        Vector trace(x.row(last).begin(), x.row(last).end());
        traj.times.push_back(t);
        traj.l2_norms.push_back(l2_norm(x, config.grid));
        traj.control_traces.push_back(control::saturate(K * trace, plant.u_max));
        traj.boundary_traces.push_back(std::move(trace));
        const double density = disturbance_energy_density(config.disturbance, t, config.grid);
        if (traj.disturbance_energy.empty()) {
            traj.disturbance_energy.push_back(0.0);
        } else {
            const double span = t - traj.times[traj.times.size() - 2];
            traj.disturbance_energy.push_back(traj.disturbance_energy.back() + 0.5 * span * (prev_density + density));
        }
        prev_density = density;
        if (config.lyapunov) {
            traj.lyapunov_values->push_back(lyapunov_value(x, config.lyapunov->P, config.lyapunov->mu, config.grid));
        }
        if (config.keep_snapshots) traj.snapshots.push_back(x);
    };

    Field x = sample(config.initial, 0.0, config.grid);
    record(x, 0.0);
    for (std::size_t s = 1; s <= steps; ++s) {
        const double t = static_cast<double>(s - 1) * dt;
        x = step(x, plant, K, t, dt, config);
        const double t_next = static_cast<double>(s) * dt;
        if (!x.all_finite()) {
            std::ostringstream os;
            os << "simulation blew up: non-finite state at t = " << t_next;
            throw BlowUpError(os.str(), t_next);
        }
        if (s % stride == 0 || s == steps) record(x, t_next);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Functionals
// ---------------------------------------------------------------------------

double l2_norm(const Field& state, const Grid& grid) {
    double s = 0.0;
    for (double v : state.data()) s += v * v;
    return std::sqrt(s * grid.dz());
}

double lyapunov_value(const Field& state, const DiagMatrix& P, double mu, const Grid& grid) {
    double s = 0.0;
    for (std::size_t j = 0; j < state.rows(); ++j) {
        double q = 0.0;
        for (std::size_t i = 0; i < state.cols(); ++i) q += P[i] * state(j, i) * state(j, i);
        s += std::exp(-mu * grid.center(j)) * q;
    }
    return s * grid.dz();
}

double lyapunov_derivative(const Field& state, const Field& direction, const DiagMatrix& P, double mu,
                           const Grid& grid) {
    if (state.rows() != direction.rows() || state.cols() != direction.cols()) {
        throw linalg::DimensionError("lyapunov_derivative: shape mismatch");
    }
    double s = 0.0;
    for (std::size_t j = 0; j < state.rows(); ++j) {
        double q = 0.0;
        for (std::size_t i = 0; i < state.cols(); ++i) q += P[i] * state(j, i) * direction(j, i);
        s += std::exp(-mu * grid.center(j)) * q;
    }
    return 2.0 * s * grid.dz();
}

double frechet_check(const DiagMatrix& P, double mu, const Field& state, const Field& direction, double stepsize,
                     const Grid& grid) {
    if (!(stepsize > 0.0)) throw std::invalid_argument("frechet_check: stepsize must be positive");
    const double h_norm = l2_norm(direction, grid);
    if (h_norm == 0.0) throw std::invalid_argument("frechet_check: direction must be nonzero");

    const Field plus = state + direction * stepsize;
    const Field minus = state - direction * stepsize;
    const double fd = (lyapunov_value(plus, P, mu, grid) - lyapunov_value(minus, P, mu, grid)) / (2.0 * stepsize);
    const double exact = lyapunov_derivative(state, direction, P, mu, grid);
    return std::abs(fd - exact) / std::max(std::abs(exact), h_norm * h_norm);
}

IssBoundParams IssBoundParams::from_weight(const DiagMatrix& P, double mu, double alpha, double chi, double x0_norm) {
    return {std::exp(-mu) * P.min(), P.max(), alpha, chi, x0_norm};
}

void IssBoundParams::validate() const {
    if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0 && chi > 0.0)) throw ConfigError("ISS constants must be positive");
    if (!(c1 <= c2)) throw ConfigError("ISS constants require c1 <= c2");
    if (!(x0_norm >= 0.0)) throw ConfigError("initial norm must be nonnegative");
}

double iss_rhs(double t, const IssBoundParams& p, double disturbance_energy) {
    p.validate();
    return std::exp(-0.5 * p.c3 * t) * std::sqrt(p.c2 / p.c1) * p.x0_norm +
           p.chi / std::sqrt(p.c1) * std::sqrt(std::max(0.0, disturbance_energy));
}

} // namespace hypiss::pde
