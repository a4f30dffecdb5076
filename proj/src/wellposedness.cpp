#include <algorithm>
#include <cmath>
#include <limits>

#include "hypiss/control.hpp"

namespace hypiss::control {

namespace {

struct Norms {
    Matrix hcl;
    double hcl_norm;
    double bk_norm;
};

Norms closed_loop_norms(const Plant& plant, const Matrix& K) {
    Norms n{closed_loop_matrix(plant, K), 0.0, 0.0};
    n.hcl_norm = linalg::spectral_norm(n.hcl);
    n.bk_norm = linalg::spectral_norm(plant.B * K);
    return n;
}

SymMatrix input_energy(const Plant& plant) {
    return SymMatrix::symmetrize(plant.B.transpose() * (plant.lambda * plant.B));
}

// ln ‖H_clᵀΛH_clΛ⁻¹ + τKᵀKΛ⁻¹ + ‖H_clᵀΛB‖²Λ⁻¹‖
double mu_lower_bound(const Plant& plant, const Matrix& K, const Matrix& hcl, double tau) {
    const DiagMatrix lambda_inv = linalg::invert_diag(plant.lambda);
    const Matrix hclt = hcl.transpose();
    const double coupling = linalg::spectral_norm(hclt * (plant.lambda * plant.B));
    const Matrix sum = (hclt * (plant.lambda * hcl)) * lambda_inv + (K.transpose() * K) * lambda_inv * tau +
                       lambda_inv.to_matrix() * (coupling * coupling);
    return std::log(linalg::spectral_norm(sum));
}

} // namespace

WellPosednessConstants wellposedness_certificate(const Plant& plant, const Matrix& K, double delta) {
    plant.validate();
    if (K.rows() != plant.m() || K.cols() != plant.n()) throw linalg::DimensionError("K must be m x n");
    if (!(delta > 0.0)) throw std::invalid_argument("wellposedness_certificate: delta must be positive");

    WellPosednessConstants w;
    w.tau = 1.0 + linalg::max_eig(input_energy(plant)) + delta;

    const Norms norms = closed_loop_norms(plant, K);
    w.mu_bound = mu_lower_bound(plant, K, norms.hcl, w.tau);
    w.mu_wp = std::max(w.mu_bound, 0.0) + delta;

    w.contraction_norm = norms.hcl_norm + norms.bk_norm;
    const double lambda_max = plant.lambda.max();
    // −λmax·ln(0) = +∞ leaves only the −μ/2 requirement.
    const double contraction_rho = w.contraction_norm > 0.0 ? -lambda_max * std::log(w.contraction_norm)
                                                            : std::numeric_limits<double>::infinity();
    w.rho = std::min(-0.5 * w.mu_wp, contraction_rho) - delta;
    return w;
}

WellPosednessCheck check_wellposedness(const Plant& plant, const Matrix& K, const WellPosednessConstants& w) {
    WellPosednessCheck c;
    c.tau_slack = -1.0 - linalg::max_eig(input_energy(plant).shifted(-w.tau));

    const Norms norms = closed_loop_norms(plant, K);
    c.mu_slack = w.mu_wp - mu_lower_bound(plant, K, norms.hcl, w.tau);
    c.rho_slack = -0.5 * w.mu_wp - w.rho;
    c.contraction_slack = 1.0 - std::exp(w.rho / plant.lambda.max()) * (norms.hcl_norm + norms.bk_norm);
    return c;
}

} // namespace hypiss::control
