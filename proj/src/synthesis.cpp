#include <algorithm>
#include <cmath>
#include <limits>

#include "hypiss/control.hpp"

namespace hypiss::control {

namespace {

using lmi::Point;
using lmi::Sense;
using lmi::VarSpec;

std::vector<VarSpec> synthesis_variables(const Plant& plant) {
    return {VarSpec::diagonal("Q", plant.n()), VarSpec::diagonal("S", plant.m()),
            VarSpec::full("W", plant.m(), plant.n()), VarSpec::symmetric("Gamma_hat", plant.n()),
            VarSpec::scalar("c")};
}

// [[−QΛ⁻¹, HQ + BW, BS], [*, −e^{−μ}ΛQ, −Wᵀ], [*, *, −2S]]
SymMatrix boundary_block(const Plant& plant, double mu, const DiagMatrix& Q, const DiagMatrix& S,
                         const Matrix& W) {
    const DiagMatrix lambda_inv = linalg::invert_diag(plant.lambda);
    return linalg::assemble_symmetric({
        {-(Q * lambda_inv).to_matrix(), plant.H * Q.to_matrix() + plant.B * W, plant.B * S.to_matrix()},
        {Matrix(), -(plant.lambda * Q * std::exp(-mu)).to_matrix(), -W.transpose()},
        {Matrix(), Matrix(), -(S * 2.0).to_matrix()},
    });
}

// [[Γ̂, N], [*, I]]
SymMatrix disturbance_block(const Plant& plant, const SymMatrix& gamma_hat) {
    return linalg::assemble_symmetric({
        {gamma_hat.full(), plant.N},
        {Matrix(), Matrix::identity(plant.q())},
    });
}

// Q(αI − μΛ) + Γ̂
SymMatrix decay_block(const Plant& plant, double mu, double alpha, const DiagMatrix& Q,
                      const SymMatrix& gamma_hat) {
    Vector d(plant.n());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = Q[i] * (alpha - mu * plant.lambda[i]);
    return DiagMatrix(std::move(d)).to_sym() + gamma_hat;
}

SymMatrix gain_bound_block(const DiagMatrix& Q, double c) { return Q.to_sym().shifted(-c); }

} // namespace

lmi::Point SynthesisValues::to_point() const {
    Point p;
    p.set("Q", Q.to_matrix());
    p.set("S", S.to_matrix());
    p.set("W", W);
    p.set("Gamma_hat", gamma_hat.full());
    p.set("c", Matrix(1, 1, c));
    return p;
}

lmi::LmiProblem build_synthesis_lmis(const Plant& plant, double mu, double alpha, double epsilon) {
    plant.validate();
    if (!(mu > 0.0) || !(alpha > 0.0)) throw std::invalid_argument("build_synthesis_lmis: mu and alpha must be positive");

    lmi::LmiProblem problem(epsilon);
    const auto vars = synthesis_variables(plant);
    for (const auto& v : vars) problem.add_variable(v);

    using lmi::AffineMatrixExpr;
    problem.add_constraint({labels::boundary, AffineMatrixExpr::from_map(vars, [&](const Point& p) {
                                return boundary_block(plant, mu, p.diag("Q"), p.diag("S"), p.at("W"));
                            }),
                            Sense::NegativeDefinite});
    problem.add_constraint({labels::disturbance, AffineMatrixExpr::from_map(vars, [&](const Point& p) {
                                return disturbance_block(plant, p.sym("Gamma_hat"));
                            }),
                            Sense::PositiveDefinite});
    problem.add_constraint({labels::decay, AffineMatrixExpr::from_map(vars, [&](const Point& p) {
                                return decay_block(plant, mu, alpha, p.diag("Q"), p.sym("Gamma_hat"));
                            }),
                            Sense::NegativeDefinite});
    problem.add_constraint({labels::gain_bound, AffineMatrixExpr::from_map(vars, [&](const Point& p) {
                                return gain_bound_block(p.diag("Q"), p.scalar("c"));
                            }),
                            Sense::NegativeDefinite, /*strict=*/false});
    problem.add_constraint({labels::q_positive,
                            AffineMatrixExpr::from_map(vars, [](const Point& p) { return p.diag("Q").to_sym(); }),
                            Sense::PositiveDefinite});
    problem.add_constraint({labels::s_positive,
                            AffineMatrixExpr::from_map(vars, [](const Point& p) { return p.diag("S").to_sym(); }),
                            Sense::PositiveDefinite});
    problem.add_constraint({labels::gamma_positive,
                            AffineMatrixExpr::from_map(vars, [](const Point& p) { return p.sym("Gamma_hat"); }),
                            Sense::PositiveDefinite});

    problem.set_objective({{{lmi::EntryRef{"c", 0, 0}, 1.0}}, 0.0});
    return problem;
}

std::vector<std::pair<std::string, double>> synthesis_margins(const Plant& plant, double mu, double alpha,
                                                               double epsilon, const SynthesisValues& v) {
    const lmi::LmiProblem problem = build_synthesis_lmis(plant, mu, alpha, epsilon);
    const auto m = lmi::margins(problem, v.to_point());
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t i = 0; i < m.size(); ++i) out.emplace_back(problem.constraints()[i].label, m[i]);
    return out;
}

IssCoefficients iss_coefficients(const DiagMatrix& P, double mu, double alpha, double chi) {
    if (!P.is_positive()) throw std::invalid_argument("iss_coefficients: P must be positive diagonal");
    const double pmax = P.max();
    const double pmin = P.min();
    const double growth = std::exp(0.5 * mu);
    return {0.5 * alpha, std::sqrt(pmax / pmin) * growth, chi * growth / std::sqrt(pmin)};
}

DiagMatrix SynthesisCertificate::P() const { return linalg::invert_diag(Q); }

SymMatrix SynthesisCertificate::gamma() const {
    const DiagMatrix p = P();
    return SymMatrix::symmetrize(p * gamma_hat.full() * p);
}

double SynthesisCertificate::min_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& [label, v] : margins) m = std::min(m, v);
    return m;
}

SynthesisResult synthesize(const Plant& plant, double mu, double alpha, const SynthesisOptions& opts) {
    const lmi::LmiProblem problem = build_synthesis_lmis(plant, mu, alpha, opts.epsilon);

    SynthesisResult result;
    result.solution = sdp::minimize(problem, opts.solver);
    result.status = result.solution.status;
    if (!result.solution.ok()) return result;

    const Point& p = result.solution.point;
    SynthesisValues values{p.diag("Q"), p.diag("S"), p.at("W"), p.sym("Gamma_hat"), p.scalar("c")};

    SynthesisCertificate cert;
    cert.Q = values.Q;
    cert.S = values.S;
    cert.W = values.W;
    cert.gamma_hat = values.gamma_hat;
    cert.mu = mu;
    cert.alpha = alpha;
    cert.c = values.c;
    cert.epsilon = opts.epsilon;
    cert.K = values.W * linalg::invert_diag(values.Q);
    cert.iss = iss_coefficients(cert.P(), mu, alpha, 1.0);
    cert.margins = synthesis_margins(plant, mu, alpha, opts.epsilon, values);
    result.certificate = std::move(cert);
    return result;
}

} // namespace hypiss::control
