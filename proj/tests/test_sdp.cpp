#include <doctest.h>

#include <cmath>

#include "hypiss/control.hpp"
#include "hypiss/sdp.hpp"

using namespace hypiss;
using namespace hypiss::lmi;
using sdp::Status;

namespace {

SymMatrix s1(double v) { return SymMatrix::from(Matrix{{v}}); }

LmiProblem scalar_problem(double eps) {
    LmiProblem p(eps);
    const VarSpec x = VarSpec::scalar("x");
    p.add_variable(x);
    return p;
}

// min x  s.t.  [[1, x], [x, 1]] ⪰ εI
LmiProblem off_diagonal_problem(double eps) {
    LmiProblem p = scalar_problem(eps);
    const std::vector<VarSpec> vars = p.variables();
    p.add_constraint({"psd", AffineMatrixExpr::from_map(vars, [](const Point& pt) {
                          const double x = pt.scalar("x");
                          return SymMatrix::from(Matrix{{1.0, x}, {x, 1.0}});
                      }),
                      Sense::PositiveDefinite});
    p.set_objective({{{EntryRef{"x", 0, 0}, 1.0}}, 0.0});
    return p;
}

LmiProblem without_objective(const LmiProblem& src) {
    LmiProblem p(src.epsilon());
    for (const auto& v : src.variables()) p.add_variable(v);
    for (const auto& c : src.constraints()) p.add_constraint(c);
    return p;
}

void check_reverified(const LmiProblem& prob, const sdp::Solution& sol) {
    const std::vector<double> m = margins(prob, sol.point);
    for (double v : m) CHECK(v >= -1e-9);
}

} // namespace

TEST_CASE("feasibility: single positive scalar") {
    LmiProblem q = scalar_problem(1e-6);
    AffineMatrixExpr e(s1(0.0));
    e.add_term({"x", 0, 0}, s1(1.0));
    q.add_constraint({"pos", e, Sense::PositiveDefinite});
    const sdp::Solution sol = sdp::solve_feasibility(q);
    CHECK(sol.status == Status::Feasible);
    CHECK(sol.point.scalar("x") >= 1e-6);
    check_reverified(q, sol);
}

TEST_CASE("feasibility: contradictory scalars") {
    LmiProblem q = scalar_problem(1e-6);
    AffineMatrixExpr up(s1(0.0)), down(s1(0.0));
    up.add_term({"x", 0, 0}, s1(1.0));
    down.add_term({"x", 0, 0}, s1(-1.0));
    q.add_constraint({"up", up, Sense::PositiveDefinite});
    q.add_constraint({"down", down, Sense::PositiveDefinite});
    const sdp::Solution sol = sdp::solve_feasibility(q);
    CHECK(sol.status == Status::Infeasible);
    CHECK(sol.min_margin() < 0.0);
    CHECK(sol.phase1_slack > 0.0);
}

TEST_CASE("feasibility: synthesis constraints at the reference operating point") {
    const LmiProblem syn = without_objective(control::build_synthesis_lmis(control::reference_plant(), 1.0, 0.5));
    const sdp::Solution sol = sdp::solve_feasibility(syn);
    CHECK(sol.status == Status::Feasible);
    check_reverified(syn, sol);
}

TEST_CASE("minimize: forced optimum c* = 1") {
    LmiProblem p(1e-6);
    const std::vector<VarSpec> vars{VarSpec::diagonal("q", 2), VarSpec::scalar("c")};
    for (const auto& v : vars) p.add_variable(v);
    p.add_constraint({"bound", AffineMatrixExpr::from_map(vars, [](const Point& pt) {
                          return pt.diag("q").to_sym() - SymMatrix::identity(2) * pt.scalar("c");
                      }),
                      Sense::NegativeDefinite, false});
    p.add_constraint({"floor", AffineMatrixExpr::from_map(vars, [](const Point& pt) {
                          return pt.diag("q").to_sym() - SymMatrix::identity(2);
                      }),
                      Sense::PositiveDefinite, false});
    p.set_objective({{{EntryRef{"c", 0, 0}, 1.0}}, 0.0});
    const sdp::Solution sol = sdp::minimize(p);
    CHECK(sol.status == Status::Optimal);
    REQUIRE(sol.objective);
    CHECK(std::abs(*sol.objective - 1.0) <= 1e-5);
    check_reverified(p, sol);
}

TEST_CASE("minimize: 2x2 boundary x* = -1") {
    const sdp::Solution sol = sdp::minimize(off_diagonal_problem(1e-6));
    CHECK(sol.status == Status::Optimal);
    CHECK(std::abs(sol.point.scalar("x") + 1.0) <= 1e-4);
    check_reverified(off_diagonal_problem(1e-6), sol);
}

TEST_CASE("minimize: shift making diag(-3, 2) semidefinite") {
    LmiProblem p(0.0);
    const std::vector<VarSpec> vars{VarSpec::scalar("lambda")};
    p.add_variable(vars[0]);
    p.add_constraint({"shift", AffineMatrixExpr::from_map(vars, [](const Point& pt) {
                          const double l = pt.scalar("lambda");
                          return SymMatrix::from(Matrix{{-3.0 + l, 0.0}, {0.0, 2.0 + l}});
                      }),
                      Sense::PositiveDefinite, false});
    p.set_objective({{{EntryRef{"lambda", 0, 0}, 1.0}}, 0.0});

    // brute-force scan for the smallest admissible shift
    double scan = 0.0;
    for (int k = 0; k <= 100000; ++k) {
        const double l = 1e-4 * k;
        if (std::min(-3.0 + l, 2.0 + l) >= 0.0) {
            scan = l;
            break;
        }
    }
    const sdp::Solution sol = sdp::minimize(p);
    CHECK(sol.status == Status::Optimal);
    CHECK(std::abs(sol.point.scalar("lambda") - scan) <= 1e-4);
}

TEST_CASE("minimize requires an objective") {
    LmiProblem q = scalar_problem(1e-6);
    CHECK_THROWS_AS(sdp::minimize(q), std::invalid_argument);
}

TEST_CASE("options are validated") {
    sdp::SolveOptions o;
    o.growth = 1.0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    o = {};
    o.tolerance = 0.0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    o = {};
    o.max_newton_iterations = 0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
}

TEST_CASE("objective monotonicity under tightening") {
    double prev = -INFINITY;
    for (double eps : {0.0, 1e-6, 1e-3, 1e-1}) {
        const sdp::Solution sol = sdp::minimize(off_diagonal_problem(eps));
        REQUIRE(sol.ok());
        CHECK(*sol.objective >= prev - 1e-9);
        prev = *sol.objective;
    }

    const control::Plant plant = control::reference_plant();
    double prev_c = -INFINITY;
    for (double eps : {1e-6, 1e-4, 1e-2}) {
        control::SynthesisOptions o;
        o.epsilon = eps;
        const control::SynthesisResult r = control::synthesize(plant, 1.0, 0.5, o);
        REQUIRE(r.certificate);
        CHECK(r.certificate->c >= prev_c - 1e-7);
        prev_c = r.certificate->c;
    }
}

TEST_CASE("determinism: identical inputs give identical outputs") {
    const LmiProblem syn = control::build_synthesis_lmis(control::reference_plant(), 1.0, 0.5);
    const sdp::Solution a = sdp::minimize(syn);
    const sdp::Solution b = sdp::minimize(syn);
    REQUIRE(a.status == b.status);
    CHECK(a.newton_steps == b.newton_steps);
    for (const auto& [name, m] : a.point.values()) {
        const Matrix& other = b.point.at(name);
        for (std::size_t i = 0; i < m.data().size(); ++i) CHECK(m.data()[i] == other.data()[i]);
    }
}

TEST_CASE("status strings") {
    CHECK(sdp::to_string(Status::Feasible) == "feasible");
    CHECK(sdp::to_string(Status::Optimal) == "optimal");
    CHECK(sdp::to_string(Status::Infeasible) == "infeasible");
    CHECK(sdp::to_string(Status::NumericalFailure) == "numerical_failure");
}
