#include "hypiss/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace hypiss::sdp {

using linalg::Matrix;
using linalg::SymMatrix;
using linalg::Vector;

std::string_view to_string(Status s) {
    switch (s) {
    case Status::Feasible: return "feasible";
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

void SolveOptions::validate() const {
    if (max_newton_iterations <= 0 || max_outer_iterations <= 0) {
        throw std::invalid_argument("SolveOptions: iteration limits must be positive");
    }
    if (!(initial_t > 0.0) || !(tolerance > 0.0) || !(variable_bound > 0.0)) {
        throw std::invalid_argument("SolveOptions: initial_t, tolerance and variable_bound must be positive");
    }
    if (!(growth > 1.0)) throw std::invalid_argument("SolveOptions: growth factor must exceed 1");
    if (!(infeasibility_threshold >= 0.0)) {
        throw std::invalid_argument("SolveOptions: infeasibility_threshold must be nonnegative");
    }
}

double Solution::min_margin() const {
    if (margins.empty()) return std::numeric_limits<double>::infinity();
    return *std::min_element(margins.begin(), margins.end());
}

namespace {

// G(y) = constant + Σ y_k coefficients[k] ⪰ 0, strictly inside the cone.
struct ConeBlock {
    SymMatrix constant;
    std::vector<SymMatrix> coefficients;
};

struct Barrier {
    std::size_t n = 0;
    std::vector<ConeBlock> blocks;
    Vector cost;
    /// Entries [0, boxed) are kept in (-bound, bound).
    std::size_t boxed = 0;
    double bound = 0.0;

    [[nodiscard]] double degree() const {
        double m = 2.0 * static_cast<double>(boxed);
        for (const auto& b : blocks) m += static_cast<double>(b.constant.dim());
        return m;
    }

    [[nodiscard]] SymMatrix block_value(std::size_t i, const Vector& y) const {
        Matrix acc = blocks[i].constant.full();
        for (std::size_t k = 0; k < n; ++k)
            if (y[k] != 0.0) acc += blocks[i].coefficients[k].full() * y[k];
        return SymMatrix::symmetrize(acc);
    }

    /// −Σ log det G_i − Σ log(bound² − y_k²); +inf outside the domain.
    [[nodiscard]] double barrier_value(const Vector& y) const {
        double v = 0.0;
        for (std::size_t k = 0; k < boxed; ++k) {
            const double gap = bound * bound - y[k] * y[k];
            if (!(gap > 0.0)) return std::numeric_limits<double>::infinity();
            v -= std::log(gap);
        }
        Matrix l;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            if (!linalg::cholesky(block_value(i, y), l)) return std::numeric_limits<double>::infinity();
            for (std::size_t d = 0; d < l.rows(); ++d) v -= 2.0 * std::log(l(d, d));
        }
        return v;
    }

    [[nodiscard]] double value(double t, const Vector& y) const {
        const double b = barrier_value(y);
        if (!std::isfinite(b)) return b;
        return t * linalg::dot(cost, y) + b;
    }

    void gradient_hessian(double t, const Vector& y, Vector& g, Matrix& h) const {
        g.assign(n, 0.0);
        h = Matrix(n, n);
        for (std::size_t k = 0; k < n; ++k) g[k] = t * cost[k];
        for (std::size_t k = 0; k < boxed; ++k) {
            const double up = bound - y[k];
            const double lo = bound + y[k];
            g[k] += 1.0 / up - 1.0 / lo;
            h(k, k) += 1.0 / (up * up) + 1.0 / (lo * lo);
        }
        std::vector<Matrix> scaled(n);
        std::vector<bool> active(n);
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            const Matrix ginv = linalg::inverse_spd(block_value(i, y)).full();
            const std::size_t d = ginv.rows();
            for (std::size_t k = 0; k < n; ++k) {
                const Matrix& a = blocks[i].coefficients[k].full();
                active[k] = a.max_abs() != 0.0;
                if (!active[k]) continue;
                scaled[k] = ginv * a;
                double tr = 0.0;
                for (std::size_t r = 0; r < d; ++r) tr += scaled[k](r, r);
                g[k] -= tr;
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (!active[j]) continue;
                for (std::size_t k = j; k < n; ++k) {
                    if (!active[k]) continue;
                    double s = 0.0;
                    for (std::size_t r = 0; r < d; ++r)
                        for (std::size_t c = 0; c < d; ++c) s += scaled[j](r, c) * scaled[k](c, r);
                    h(j, k) += s;
                    if (k != j) h(k, j) += s;
                }
            }
        }
    }
};

enum class CenterResult { Centered, Stopped, Stalled };

struct PathState {
    Vector y;
    int newton_steps = 0;
};

/// Damped Newton centering of t·cᵀy + barrier(y). `stop` is checked after
/// every accepted step.
CenterResult center(const Barrier& bp, double t, PathState& st, const SolveOptions& opts,
                    const std::function<bool(const Vector&)>& stop) {
    Vector g;
    Matrix h;
    for (int it = 0; it < opts.max_newton_iterations; ++it) {
        bp.gradient_hessian(t, st.y, g, h);

        Vector neg_g(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) neg_g[k] = -g[k];
        Vector step;
        try {
            step = linalg::solve_linear(h, neg_g);
        } catch (const linalg::NumericalError&) {
            // Regularize a numerically singular Hessian and retry once.
            double reg = 1e-12 * std::max(1.0, h.max_abs());
            for (std::size_t k = 0; k < h.rows(); ++k) h(k, k) += reg;
            step = linalg::solve_linear(h, neg_g);
        }
        const double decrement2 = -linalg::dot(g, step);
        if (!std::isfinite(decrement2)) return CenterResult::Stalled;
        if (decrement2 <= 1e-10) return CenterResult::Centered;

        const double f0 = bp.value(t, st.y);
        double a = 1.0;
        Vector trial(st.y.size());
        bool accepted = false;
        for (int ls = 0; ls < 80; ++ls) {
            for (std::size_t k = 0; k < trial.size(); ++k) trial[k] = st.y[k] + a * step[k];
            const double f1 = bp.value(t, trial);
            if (std::isfinite(f1) && f1 <= f0 - 0.25 * a * decrement2) {
                accepted = true;
                break;
            }
            a *= 0.5;
        }
        if (!accepted) {
            // Rounding floor: treat as centered when the decrement is already small.
            return decrement2 < 1e-6 ? CenterResult::Centered : CenterResult::Stalled;
        }
        st.y = trial;
        ++st.newton_steps;
        if (stop && stop(st.y)) return CenterResult::Stopped;
    }
    return CenterResult::Centered;
}

ConeBlock to_cone(const lmi::StandardForm::Block& b) {
    // ⪯ −εI  ⇔  −F − εI ⪰ 0 ;  ⪰ +εI  ⇔  F − εI ⪰ 0
    const double sign = b.sense == lmi::Sense::NegativeDefinite ? -1.0 : 1.0;
    ConeBlock c;
    c.constant = (b.constant * sign).shifted(-b.slack);
    c.coefficients.reserve(b.coefficients.size());
    for (const auto& a : b.coefficients) c.coefficients.push_back(a * sign);
    return c;
}

Vector initial_point(const lmi::StandardForm& sf) {
    Vector x(sf.entry_count(), 0.0);
    std::size_t k = 0;
    for (const auto& v : sf.variables)
        for (std::size_t e = 0; e < v.entry_count(); ++e, ++k)
            if (v.shape == lmi::Shape::Diagonal) x[k] = 1.0;
    return x;
}

struct PhaseOneResult {
    Vector x;
    double slack = 0.0;
    bool feasible = false;
    bool numerical_failure = false;
    int newton_steps = 0;
    std::string message;
};

PhaseOneResult phase_one(const lmi::StandardForm& sf, const SolveOptions& opts) {
    const std::size_t nx = sf.entry_count();
    Barrier bp;
    bp.n = nx + 1;
    bp.boxed = nx;
    bp.bound = opts.variable_bound;
    bp.cost.assign(bp.n, 0.0);
    bp.cost[nx] = 1.0;

    Vector x0 = initial_point(sf);
    double worst = 0.0;
    for (const auto& b : sf.blocks) {
        ConeBlock c = to_cone(b);
        SymMatrix g0 = c.constant;
        for (std::size_t k = 0; k < nx; ++k)
            if (x0[k] != 0.0) g0 += c.coefficients[k] * x0[k];
        worst = std::min(worst, linalg::min_eig(g0));
        c.coefficients.push_back(SymMatrix::identity(c.constant.dim()));
        bp.blocks.push_back(std::move(c));
    }

    PhaseOneResult out;
    PathState st;
    st.y = x0;
    st.y.push_back(1.0 - worst);

    auto strictly_feasible = [nx](const Vector& y) { return y[nx] < 0.0; };
    if (strictly_feasible(st.y)) {
        out.x.assign(st.y.begin(), st.y.begin() + static_cast<std::ptrdiff_t>(nx));
        out.slack = st.y[nx];
        out.feasible = true;
        return out;
    }

    const double degree = bp.degree();
    double t = opts.initial_t;
    for (int outer = 0; outer < opts.max_outer_iterations; ++outer) {
        CenterResult r;
        try {
            r = center(bp, t, st, opts, strictly_feasible);
        } catch (const linalg::NumericalError& e) {
            out.numerical_failure = true;
            out.message = std::string("phase 1: ") + e.what();
            break;
        }
        if (r == CenterResult::Stopped) {
            out.feasible = true;
            break;
        }
        if (r == CenterResult::Stalled) {
            out.numerical_failure = true;
            out.message = "phase 1: Newton step stalled";
            break;
        }
        if (st.y[nx] - degree / t > opts.infeasibility_threshold) {
            out.message = "phase 1: slack provably positive";
            break;
        }
        if (degree / t < opts.tolerance) {
            out.message = "phase 1: converged with nonnegative slack";
            break;
        }
        t *= opts.growth;
    }
    out.x.assign(st.y.begin(), st.y.begin() + static_cast<std::ptrdiff_t>(nx));
    out.slack = st.y[nx];
    out.newton_steps = st.newton_steps;
    if (!out.feasible && !out.numerical_failure && out.message.empty()) {
        out.message = "phase 1: outer iteration limit reached";
    }
    return out;
}

Solution finish(const lmi::LmiProblem& problem, const lmi::StandardForm& sf, const Vector& x, Status status) {
    Solution s;
    s.status = status;
    s.point = sf.to_point(x);
    s.margins = lmi::margins(problem, s.point);
    if (problem.objective()) s.objective = problem.objective_value(s.point);
    return s;
}

Solution from_phase_one(const lmi::LmiProblem& problem, const lmi::StandardForm& sf,
                        const PhaseOneResult& p1) {
    Status st = Status::Infeasible;
    if (p1.feasible) st = Status::Feasible;
    else if (p1.numerical_failure) st = Status::NumericalFailure;
    Solution s = finish(problem, sf, p1.x, st);
    s.phase1_slack = p1.slack;
    s.newton_steps = p1.newton_steps;
    s.message = p1.message;
    return s;
}

} // namespace

Solution solve_feasibility(const lmi::LmiProblem& problem, const SolveOptions& opts) {
    opts.validate();
    const lmi::StandardForm sf = lmi::vectorize(problem);
    return from_phase_one(problem, sf, phase_one(sf, opts));
}

Solution minimize(const lmi::LmiProblem& problem, const SolveOptions& opts) {
    opts.validate();
    if (!problem.objective()) throw std::invalid_argument("minimize: problem has no objective");
    const lmi::StandardForm sf = lmi::vectorize(problem);

    const PhaseOneResult p1 = phase_one(sf, opts);
    if (!p1.feasible) return from_phase_one(problem, sf, p1);

    Barrier bp;
    bp.n = sf.entry_count();
    bp.boxed = bp.n;
    bp.bound = opts.variable_bound;
    bp.cost = *sf.objective;
    for (const auto& b : sf.blocks) bp.blocks.push_back(to_cone(b));

    PathState st;
    st.y = p1.x;
    st.newton_steps = p1.newton_steps;

    const double degree = bp.degree();
    double t = opts.initial_t;
    Status status = Status::NumericalFailure;
    std::string message = "phase 2: outer iteration limit reached";
    for (int outer = 0; outer < opts.max_outer_iterations; ++outer) {
        CenterResult r;
        try {
            r = center(bp, t, st, opts, {});
        } catch (const linalg::NumericalError& e) {
            message = std::string("phase 2: ") + e.what();
            break;
        }
        if (r == CenterResult::Stalled) {
            // A stalled late iterate is still strictly feasible; accept it if the
            // gap is already small.
            if (degree / t < std::sqrt(opts.tolerance)) {
                status = Status::Optimal;
                message = "phase 2: stalled near optimum";
            } else {
                message = "phase 2: Newton step stalled";
            }
            break;
        }
        if (degree / t < opts.tolerance) {
            status = Status::Optimal;
            message = "phase 2: converged";
            break;
        }
        t *= opts.growth;
    }

    Solution s = finish(problem, sf, st.y, status);
    s.phase1_slack = p1.slack;
    s.newton_steps = st.newton_steps;
    s.message = std::move(message);
    return s;
}

} // namespace hypiss::sdp
