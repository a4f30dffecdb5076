#include <cmath>
#include <stdexcept>

#include "hypiss/control.hpp"

namespace hypiss::control {

void Plant::validate() const {
    const std::size_t nn = n();
    if (nn == 0) throw std::invalid_argument("plant: lambda is empty");
    if (!lambda.is_positive()) throw std::invalid_argument("plant: lambda must be strictly positive");
    if (H.rows() != nn || H.cols() != nn) throw linalg::DimensionError("plant: H must be n x n");
    if (B.rows() != nn || B.cols() == 0) throw linalg::DimensionError("plant: B must be n x m");
    if (N.rows() != nn || N.cols() == 0) throw linalg::DimensionError("plant: N must be n x q");
    if (u_max.size() != B.cols()) throw linalg::DimensionError("plant: u_max must have length m");
    for (double u : u_max)
        if (!(u > 0.0)) throw std::invalid_argument("plant: saturation levels must be positive");
    if (!H.all_finite() || !B.all_finite() || !N.all_finite()) {
        throw std::invalid_argument("plant: matrices must be finite");
    }
}

Plant reference_plant() {
    Plant p;
    p.lambda = DiagMatrix{1.0, std::sqrt(2.0)};
    p.H = Matrix{{0.25, 0.0}, {-1.0, 0.25}};
    p.B = Matrix::identity(2);
    p.N = Matrix::identity(2);
    p.u_max = {0.3, 0.3};
    return p;
}

Matrix reference_gain() { return Matrix{{-0.24, 0.0}, {0.33, -0.08}}; }

Vector saturate(const Vector& u, const Vector& u_max) {
    if (u.size() != u_max.size()) throw linalg::DimensionError("saturate: dimension mismatch");
    Vector out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u_max[i] > 0.0)) throw std::invalid_argument("saturate: levels must be positive");
        const double mag = std::min(std::abs(u[i]), u_max[i]);
        out[i] = u[i] > 0.0 ? mag : (u[i] < 0.0 ? -mag : 0.0);
    }
    return out;
}

Vector deadzone(const Vector& u, const Vector& u_max) {
    Vector out = saturate(u, u_max);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] -= u[i];
    return out;
}

double sector_value(const Vector& nu, const Vector& u_max, const DiagMatrix& T) {
    if (T.dim() != nu.size()) throw linalg::DimensionError("sector_value: T dimension mismatch");
    const Vector phi = deadzone(nu, u_max);
    double s = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) s += phi[i] * T[i] * (phi[i] + nu[i]);
    return s;
}

Matrix closed_loop_matrix(const Plant& plant, const Matrix& K) { return plant.H + plant.B * K; }

Vector closed_loop_boundary(const Plant& plant, const Matrix& K, const Vector& x1) {
    const Vector lin = closed_loop_matrix(plant, K) * x1;
    const Vector corr = plant.B * deadzone(K * x1, plant.u_max);
    Vector out(lin.size());
    for (std::size_t i = 0; i < lin.size(); ++i) out[i] = lin[i] + corr[i];
    return out;
}

Vector boundary_direct(const Plant& plant, const Matrix& K, const Vector& x1) {
    const Vector hx = plant.H * x1;
    const Vector bu = plant.B * saturate(K * x1, plant.u_max);
    Vector out(hx.size());
    for (std::size_t i = 0; i < hx.size(); ++i) out[i] = hx[i] + bu[i];
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    if (count == 0) return {};
    if (count == 1) return {lo};
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    out.back() = hi;
    return out;
}

} // namespace hypiss::control
