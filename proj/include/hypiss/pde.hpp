#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypiss/control.hpp"
#include "hypiss/linalg.hpp"

// Two-step Lax-Friedrichs simulation of the closed-loop transport system on
// z ∈ (0, 1), plus the Lyapunov/ISS diagnostics evaluated along trajectories.
namespace hypiss::pde {

using control::Plant;
using linalg::DiagMatrix;
using linalg::Matrix;
using linalg::Vector;

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class BlowUpError : public std::runtime_error {
public:
    BlowUpError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

enum class SignalKind { Zero, SinusoidalProduct, CosineProfile, Tabulated };
enum class Phase { Sin, Cos };

/// A vector-valued signal of (t, z).
///   sinusoidal_product: a·sin(z·t) or a·cos(z·t) per component
///   cosine_profile:     a·(cos(2π k_i z) − 1), time independent
///   tabulated:          piecewise-linear in z over the sample grid, time independent
struct SignalSpec {
    SignalKind kind = SignalKind::Zero;
    std::size_t components = 0;
    double amplitude = 0.0;
    std::vector<Phase> phases;
    std::vector<double> frequencies;
    std::vector<double> table_grid;
    std::vector<Vector> table_values; ///< one sample list per component

    static SignalSpec zero(std::size_t components);
    static SignalSpec sinusoidal_product(double amplitude, std::vector<Phase> phases);
    static SignalSpec cosine_profile(double amplitude, std::vector<double> frequencies);
    static SignalSpec tabulated(std::vector<double> grid, std::vector<Vector> values);

    [[nodiscard]] std::size_t dim() const noexcept { return components; }
    void validate() const;
    [[nodiscard]] Vector evaluate(double t, double z) const;
};

/// Uniform cell-centred grid on (0, 1).
class Grid {
public:
    explicit Grid(std::size_t cells = 400);

    [[nodiscard]] std::size_t cells() const noexcept { return cells_; }
    [[nodiscard]] double dz() const noexcept { return 1.0 / static_cast<double>(cells_); }
    [[nodiscard]] double center(std::size_t j) const noexcept {
        return (static_cast<double>(j) + 0.5) / static_cast<double>(cells_);
    }

private:
    std::size_t cells_;
};

/// cells × n; row j is the state at the centre of cell j.
using Field = Matrix;

struct LyapunovWeight {
    DiagMatrix P;
    double mu = 0.0;
};

struct SimConfig {
    Grid grid{400};
    double t_final = 25.0;
    double cfl = 0.9;
    SignalSpec disturbance;
    SignalSpec initial;
    /// 0 picks the smallest stride that records at most 2000 points.
    std::size_t snapshot_stride = 0;
    bool keep_snapshots = false;
    std::optional<LyapunovWeight> lyapunov;

    void validate(const Plant& plant) const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> l2_norms;
    std::vector<Vector> boundary_traces; ///< X(t, 1)
    std::vector<Vector> control_traces;  ///< σ(K X(t, 1))
    /// ∫₀ᵗ ‖d(θ)‖² dθ by the trapezoid rule over recorded times.
    std::vector<double> disturbance_energy;
    std::optional<std::vector<double>> lyapunov_values;
    std::vector<Field> snapshots;
    double dt = 0.0;
    std::size_t steps = 0;
};

/// Largest Δt allowed by the CFL number, λmax·Δt/Δz = cfl.
double max_time_step(const Plant& plant, const Grid& grid, double cfl);

Field sample(const SignalSpec& spec, double t, const Grid& grid);

/// One two-stage update from t to t + dt.
Field step(const Field& state, const Plant& plant, const Matrix& K, double t, double dt, const SimConfig& config);

Trajectory simulate(const Plant& plant, const Matrix& K, const SimConfig& config);

/// √(Σ_j |X_j|² Δz)
double l2_norm(const Field& state, const Grid& grid);
/// ∫ e^{−μz} ⟨X, P X⟩ dz by the midpoint rule.
double lyapunov_value(const Field& state, const DiagMatrix& P, double mu, const Grid& grid);
/// DV(X)h = 2 ∫ e^{−μz} ⟨P X, h⟩ dz.
double lyapunov_derivative(const Field& state, const Field& direction, const DiagMatrix& P, double mu,
                           const Grid& grid);
/// Relative discrepancy between the central difference of V along h and DV(X)h,
/// normalized by max(|DV(X)h|, ‖h‖²).
double frechet_check(const DiagMatrix& P, double mu, const Field& state, const Field& direction, double stepsize,
                     const Grid& grid);

struct IssBoundParams {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double chi = 0.0;
    double x0_norm = 0.0;

    /// c₁ = e^{−μ}λmin(P), c₂ = λmax(P), c₃ = α.
    static IssBoundParams from_weight(const DiagMatrix& P, double mu, double alpha, double chi, double x0_norm);
    void validate() const;
};

/// e^{−c₃t/2}·√(c₂/c₁)·‖X₀‖ + (χ/√c₁)·√energy
double iss_rhs(double t, const IssBoundParams& params, double disturbance_energy);

} // namespace hypiss::pde
