#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hypiss/linalg.hpp"
#include "hypiss/lmi.hpp"
#include "hypiss/sdp.hpp"

// Saturated boundary control of X_t + ΛX_z = N d, X(t,0) = H X(t,1) + B σ(K X(t,1)).
namespace hypiss::control {

using linalg::DiagMatrix;
using linalg::Matrix;
using linalg::SymMatrix;
using linalg::Vector;

struct Plant {
    DiagMatrix lambda; ///< transport speeds, strictly positive
    Matrix H;          ///< n×n boundary reflection
    Matrix B;          ///< n×m boundary input map
    Matrix N;          ///< n×q in-domain disturbance map
    Vector u_max;      ///< saturation levels, length m

    [[nodiscard]] std::size_t n() const noexcept { return lambda.dim(); }
    [[nodiscard]] std::size_t m() const noexcept { return B.cols(); }
    [[nodiscard]] std::size_t q() const noexcept { return N.cols(); }

    /// Throws linalg::DimensionError or std::invalid_argument on inconsistent data.
    void validate() const;
};

/// The two-state reference plant: Λ = diag(1, √2), H = [[0.25, 0], [−1, 0.25]],
/// B = I, N = I₂, ū = (0.3, 0.3).
Plant reference_plant();
/// Gain reported for the reference plant (rounded to two digits).
Matrix reference_gain();

// ---------------------------------------------------------------------------
// Nonlinearities
// ---------------------------------------------------------------------------

/// σ(u)_i = min(|u_i|, ū_i)·sign(u_i)
Vector saturate(const Vector& u, const Vector& u_max);
/// φ(u) = σ(u) − u
Vector deadzone(const Vector& u, const Vector& u_max);
/// φ(ν)ᵀ T (φ(ν) + ν); nonpositive for every ν and positive diagonal T.
double sector_value(const Vector& nu, const Vector& u_max, const DiagMatrix& T);

Matrix closed_loop_matrix(const Plant& plant, const Matrix& K);
/// H_cl x1 + B φ(K x1).
Vector closed_loop_boundary(const Plant& plant, const Matrix& K, const Vector& x1);
/// H x1 + B σ(K x1).
Vector boundary_direct(const Plant& plant, const Matrix& K, const Vector& x1);

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

/// Constraint labels used by build_synthesis_lmis.
namespace labels {
inline constexpr const char* boundary = "boundary";           // (2n+m) block in Q, S, W
inline constexpr const char* disturbance = "disturbance";     // [[Γ̂, N], [*, I]] ⪰ εI
inline constexpr const char* decay = "decay";                 // Q(αI − μΛ) + Γ̂ ⪯ −εI
inline constexpr const char* gain_bound = "gain_bound";       // Q − cI ⪯ 0
inline constexpr const char* q_positive = "Q_positive";
inline constexpr const char* s_positive = "S_positive";
inline constexpr const char* gamma_positive = "Gamma_hat_positive";
} // namespace labels

struct SynthesisValues {
    DiagMatrix Q;
    DiagMatrix S;
    Matrix W;
    SymMatrix gamma_hat;
    double c = 0.0;

    [[nodiscard]] lmi::Point to_point() const;
};

/// Variables Q (diag n), S (diag m), W (m×n), Gamma_hat (sym n), c (scalar);
/// objective min c.
lmi::LmiProblem build_synthesis_lmis(const Plant& plant, double mu, double alpha, double epsilon = 1e-6);

struct IssCoefficients {
    double omega = 0.0;
    double kappa = 0.0;
    double gamma = 0.0;
};

/// ω = α/2, κ = √(λmax P / λmin P)·e^{μ/2}, γ = χ·e^{μ/2}/√(λmin P).
IssCoefficients iss_coefficients(const DiagMatrix& P, double mu, double alpha, double chi);

struct SynthesisCertificate {
    DiagMatrix Q;
    DiagMatrix S;
    Matrix W;
    SymMatrix gamma_hat;
    double mu = 0.0;
    double alpha = 0.0;
    double c = 0.0;
    double epsilon = 0.0;

    Matrix K;
    IssCoefficients iss;
    /// Constraint label → margin, re-verified through lmi::margin.
    std::vector<std::pair<std::string, double>> margins;

    /// P = Q⁻¹
    [[nodiscard]] DiagMatrix P() const;
    /// Γ = PΓ̂P
    [[nodiscard]] SymMatrix gamma() const;
    [[nodiscard]] double min_margin() const;
};

struct SynthesisResult {
    sdp::Status status = sdp::Status::NumericalFailure;
    std::optional<SynthesisCertificate> certificate;
    sdp::Solution solution;
};

struct SynthesisOptions {
    double epsilon = 1e-6;
    sdp::SolveOptions solver;
};

/// Minimizes c subject to the synthesis LMIs at fixed (μ, α).
SynthesisResult synthesize(const Plant& plant, double mu, double alpha, const SynthesisOptions& opts = {});

/// Recomputes every synthesis margin for given values.
std::vector<std::pair<std::string, double>> synthesis_margins(const Plant& plant, double mu, double alpha,
                                                               double epsilon, const SynthesisValues& v);

// ---------------------------------------------------------------------------
// Analysis (fixed gain)
// ---------------------------------------------------------------------------

namespace labels {
inline constexpr const char* analysis_boundary = "analysis_boundary";       // sector-augmented boundary block
inline constexpr const char* analysis_disturbance = "analysis_disturbance"; // [[Γ, PN], [*, χ²I]]
inline constexpr const char* analysis_decay = "analysis_decay";             // P(αI − μΛ) + Γ
} // namespace labels

/// Variables P (diag n), T (diag m), Gamma (sym n), chi2 (scalar).
lmi::LmiProblem build_analysis_lmis(const Plant& plant, const Matrix& K, double mu, double alpha,
                                    double epsilon = 1e-6);

/// [[H_clᵀPΛH_cl − e^{−μ}PΛ, H_clᵀPΛB − KᵀT], [*, BᵀPΛB − 2T]]
SymMatrix analysis_boundary_block(const Plant& plant, const Matrix& K, const DiagMatrix& P,
                                  const DiagMatrix& T, double mu);

struct AnalysisReport {
    bool feasible = false;
    DiagMatrix T;
    /// boundary, disturbance, decay margins (nonstrict: positive means strictly satisfied).
    std::array<double, 3> margins{};
    sdp::Status solver_status = sdp::Status::NumericalFailure;

    [[nodiscard]] double min_margin() const;
};

/// With P, Γ, χ, μ, α fixed, searches T ⪰ εI maximizing the boundary margin.
/// A known multiplier (e.g. S⁻¹ from synthesis) can be supplied; the better of the two is kept.
AnalysisReport verify_analysis(const Plant& plant, const Matrix& K, const DiagMatrix& P, const SymMatrix& Gamma,
                               double mu, double chi, double alpha, const sdp::SolveOptions& opts = {},
                               const std::optional<DiagMatrix>& T_candidate = std::nullopt);

// ---------------------------------------------------------------------------
// Well-posedness constants
// ---------------------------------------------------------------------------

struct WellPosednessConstants {
    double tau = 0.0;
    double mu_wp = 0.0;
    double rho = 0.0;
    /// ln ‖H_clᵀΛH_clΛ⁻¹ + τKᵀKΛ⁻¹ + ‖H_clᵀΛB‖²Λ⁻¹‖
    double mu_bound = 0.0;
    /// ‖H_cl‖ + ‖BK‖
    double contraction_norm = 0.0;
};

struct WellPosednessCheck {
    double tau_slack = 0.0;         ///< −1 − λmax(BᵀΛB − τI), ≥ 0 required
    double mu_slack = 0.0;          ///< μ_wp − bound, > 0 required
    double rho_slack = 0.0;         ///< −μ_wp/2 − ρ, > 0 required
    double contraction_slack = 0.0; ///< 1 − e^{ρ/λmax Λ}(‖H_cl‖+‖BK‖), > 0 required

    [[nodiscard]] bool ok() const noexcept {
        return tau_slack >= 0.0 && mu_slack > 0.0 && rho_slack > 0.0 && contraction_slack > 0.0;
    }
};

WellPosednessConstants wellposedness_certificate(const Plant& plant, const Matrix& K, double delta = 0.01);
/// Evaluates the four defining inequalities directly.
WellPosednessCheck check_wellposedness(const Plant& plant, const Matrix& K, const WellPosednessConstants& w);

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

struct FeasibilityCell {
    double mu = 0.0;
    double alpha = 0.0;
    sdp::Status status = sdp::Status::NumericalFailure;
    std::optional<double> c;
    std::optional<double> gamma; ///< √c·e^{μ/2}

    [[nodiscard]] bool feasible() const noexcept {
        return status == sdp::Status::Optimal || status == sdp::Status::Feasible;
    }
};

struct FeasibilityMap {
    std::vector<double> mu_grid;
    std::vector<double> alpha_grid;
    /// Row-major over (alpha index, mu index).
    std::vector<FeasibilityCell> cells;
    std::optional<SynthesisCertificate> best;

    [[nodiscard]] const FeasibilityCell& cell(std::size_t mu_index, std::size_t alpha_index) const {
        return cells[alpha_index * mu_grid.size() + mu_index];
    }
};

struct GridOptions {
    SynthesisOptions synthesis;
    /// 0 selects std::thread::hardware_concurrency().
    unsigned workers = 0;
};

FeasibilityMap grid_search(const Plant& plant, const std::vector<double>& mu_grid,
                           const std::vector<double>& alpha_grid, const GridOptions& opts = {});

/// count points evenly spaced on [lo, hi] inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t count);

} // namespace hypiss::control
