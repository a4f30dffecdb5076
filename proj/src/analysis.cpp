#include <algorithm>
#include <cmath>

#include "hypiss/control.hpp"

namespace hypiss::control {

namespace {

using lmi::AffineMatrixExpr;
using lmi::Point;
using lmi::Sense;
using lmi::VarSpec;

SymMatrix disturbance_block(const Plant& plant, const DiagMatrix& P, const SymMatrix& Gamma, double chi2) {
    return linalg::assemble_symmetric({
        {Gamma.full(), P * plant.N},
        {Matrix(), Matrix::identity(plant.q()) * chi2},
    });
}

SymMatrix decay_block(const Plant& plant, const DiagMatrix& P, const SymMatrix& Gamma, double mu, double alpha) {
    Vector d(plant.n());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = P[i] * (alpha - mu * plant.lambda[i]);
    return DiagMatrix(std::move(d)).to_sym() + Gamma;
}

} // namespace

SymMatrix analysis_boundary_block(const Plant& plant, const Matrix& K, const DiagMatrix& P, const DiagMatrix& T,
                                  double mu) {
    const Matrix hcl = closed_loop_matrix(plant, K);
    const Matrix pl = (P * plant.lambda).to_matrix();
    const Matrix hclt = hcl.transpose();
    return linalg::assemble_symmetric({
        {hclt * pl * hcl - pl * std::exp(-mu), hclt * pl * plant.B - K.transpose() * T.to_matrix()},
        {Matrix(), plant.B.transpose() * pl * plant.B - T.to_matrix() * 2.0},
    });
}

lmi::LmiProblem build_analysis_lmis(const Plant& plant, const Matrix& K, double mu, double alpha, double epsilon) {
    plant.validate();
    if (K.rows() != plant.m() || K.cols() != plant.n()) throw linalg::DimensionError("K must be m x n");
    if (!(mu > 0.0) || !(alpha > 0.0)) throw std::invalid_argument("build_analysis_lmis: mu and alpha must be positive");

    const std::vector<VarSpec> vars{VarSpec::diagonal("P", plant.n()), VarSpec::diagonal("T", plant.m()),
                                    VarSpec::symmetric("Gamma", plant.n()), VarSpec::scalar("chi2")};
    lmi::LmiProblem problem(epsilon);
    for (const auto& v : vars) problem.add_variable(v);

    problem.add_constraint({labels::analysis_boundary, AffineMatrixExpr::from_map(vars, [&](const Point& p) {
                                return analysis_boundary_block(plant, K, p.diag("P"), p.diag("T"), mu);
                            }),
                            Sense::NegativeDefinite});
    problem.add_constraint({labels::analysis_disturbance, AffineMatrixExpr::from_map(vars, [&](const Point& p) {
                                return disturbance_block(plant, p.diag("P"), p.sym("Gamma"), p.scalar("chi2"));
                            }),
                            Sense::PositiveDefinite});
    problem.add_constraint({labels::analysis_decay, AffineMatrixExpr::from_map(vars, [&](const Point& p) {
                                return decay_block(plant, p.diag("P"), p.sym("Gamma"), mu, alpha);
                            }),
                            Sense::NegativeDefinite});
    problem.add_constraint({"P_positive", AffineMatrixExpr::from_map(vars, [](const Point& p) { return p.diag("P").to_sym(); }),
                            Sense::PositiveDefinite});
    problem.add_constraint({"T_positive", AffineMatrixExpr::from_map(vars, [](const Point& p) { return p.diag("T").to_sym(); }),
                            Sense::PositiveDefinite});
    problem.add_constraint({"Gamma_positive", AffineMatrixExpr::from_map(vars, [](const Point& p) { return p.sym("Gamma"); }),
                            Sense::PositiveDefinite});
    problem.add_constraint({"chi2_positive",
                            AffineMatrixExpr::from_map(vars, [](const Point& p) { return SymMatrix::identity(1) * p.scalar("chi2"); }),
                            Sense::PositiveDefinite});
    return problem;
}

double AnalysisReport::min_margin() const { return *std::min_element(margins.begin(), margins.end()); }

AnalysisReport verify_analysis(const Plant& plant, const Matrix& K, const DiagMatrix& P, const SymMatrix& Gamma,
                               double mu, double chi, double alpha, const sdp::SolveOptions& opts,
                               const std::optional<DiagMatrix>& T_candidate) {
    plant.validate();
    if (K.rows() != plant.m() || K.cols() != plant.n()) throw linalg::DimensionError("K must be m x n");
    if (P.dim() != plant.n() || Gamma.dim() != plant.n()) throw linalg::DimensionError("P and Gamma must be n x n");
    if (!P.is_positive()) throw std::invalid_argument("verify_analysis: P must be positive diagonal");

    // min s  s.t.  boundary(T) ⪯ sI,  T ⪰ εI
    const std::vector<VarSpec> vars{VarSpec::diagonal("T", plant.m()), VarSpec::scalar("s")};
    lmi::LmiProblem problem;
    for (const auto& v : vars) problem.add_variable(v);
    problem.add_constraint({"boundary_shifted", AffineMatrixExpr::from_map(vars, [&](const Point& p) {
                                return analysis_boundary_block(plant, K, P, p.diag("T"), mu).shifted(-p.scalar("s"));
                            }),
                            Sense::NegativeDefinite, /*strict=*/false});
    problem.add_constraint({"T_positive", AffineMatrixExpr::from_map(vars, [](const Point& p) { return p.diag("T").to_sym(); }),
                            Sense::PositiveDefinite});
    problem.set_objective({{{lmi::EntryRef{"s", 0, 0}, 1.0}}, 0.0});

    const sdp::Solution sol = sdp::minimize(problem, opts);

    AnalysisReport report;
    report.solver_status = sol.status;
    report.T = sol.point.diag("T");
    report.margins[0] = -linalg::max_eig(analysis_boundary_block(plant, K, P, report.T, mu));
    if (T_candidate && T_candidate->dim() == plant.m() && T_candidate->is_positive()) {
        const double m = -linalg::max_eig(analysis_boundary_block(plant, K, P, *T_candidate, mu));
        if (m > report.margins[0] || !report.T.is_positive()) {
            report.T = *T_candidate;
            report.margins[0] = m;
        }
    }
    report.margins[1] = linalg::min_eig(disturbance_block(plant, P, Gamma, chi * chi));
    report.margins[2] = -linalg::max_eig(decay_block(plant, P, Gamma, mu, alpha));
    report.feasible = report.T.is_positive() && report.min_margin() >= 0.0;
    return report;
}

} // namespace hypiss::control
