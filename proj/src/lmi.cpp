#include "hypiss/lmi.hpp"

#include <algorithm>
#include <sstream>

namespace hypiss::lmi {

namespace {

std::string describe(const EntryRef& e) {
    std::ostringstream os;
    os << e.var << "(" << e.row << "," << e.col << ")";
    return os.str();
}

bool is_zero(const SymMatrix& m) { return m.full().max_abs() == 0.0; }

} // namespace

// ---------------------------------------------------------------------------
// VarSpec
// ---------------------------------------------------------------------------

std::size_t VarSpec::entry_count() const {
    switch (shape) {
    case Shape::Scalar: return 1;
    case Shape::Diagonal: return rows;
    case Shape::Full: return rows * cols;
    case Shape::Symmetric: return rows * (rows + 1) / 2;
    }
    return 0;
}

std::vector<EntryRef> VarSpec::entries() const {
    std::vector<EntryRef> out;
    out.reserve(entry_count());
    switch (shape) {
    case Shape::Scalar: out.push_back({name, 0, 0}); break;
    case Shape::Diagonal:
        for (std::size_t i = 0; i < rows; ++i) out.push_back({name, i, i});
        break;
    case Shape::Full:
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) out.push_back({name, i, j});
        break;
    case Shape::Symmetric:
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = i; j < rows; ++j) out.push_back({name, i, j});
        break;
    }
    return out;
}

bool VarSpec::owns(const EntryRef& e) const {
    if (e.var != name || e.row >= rows || e.col >= cols) return false;
    switch (shape) {
    case Shape::Scalar: return true;
    case Shape::Diagonal: return e.row == e.col;
    case Shape::Full: return true;
    case Shape::Symmetric: return e.row <= e.col;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Point
// ---------------------------------------------------------------------------

Point Point::zeros(const std::vector<VarSpec>& vars) {
    Point p;
    for (const auto& v : vars) p.set(v.name, Matrix(v.rows, v.cols));
    return p;
}

void Point::set(const std::string& name, Matrix value) {
    if (!value.all_finite()) throw IncompletePointError("Point: non-finite value for " + name);
    values_[name] = std::move(value);
}

void Point::set_entry(const VarSpec& spec, const EntryRef& e, double v) {
    auto it = values_.find(spec.name);
    if (it == values_.end()) it = values_.emplace(spec.name, Matrix(spec.rows, spec.cols)).first;
    it->second(e.row, e.col) = v;
    if (spec.shape == Shape::Symmetric) it->second(e.col, e.row) = v;
}

const Matrix& Point::at(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw IncompletePointError("Point: no value for variable " + name);
    return it->second;
}

double Point::value(const EntryRef& e) const {
    const Matrix& m = at(e.var);
    if (e.row >= m.rows() || e.col >= m.cols()) {
        throw IncompletePointError("Point: entry out of range " + describe(e));
    }
    return m(e.row, e.col);
}

linalg::DiagMatrix Point::diag(const std::string& name) const {
    const Matrix& m = at(name);
    Vector d(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) d[i] = m(i, i);
    return linalg::DiagMatrix(std::move(d));
}

SymMatrix Point::sym(const std::string& name) const { return SymMatrix::symmetrize(at(name)); }

// ---------------------------------------------------------------------------
// AffineMatrixExpr
// ---------------------------------------------------------------------------

AffineMatrixExpr AffineMatrixExpr::from_map(const std::vector<VarSpec>& vars,
                                            const std::function<SymMatrix(const Point&)>& map) {
    const Point zero = Point::zeros(vars);
    AffineMatrixExpr expr(map(zero));
    for (const auto& spec : vars) {
        for (const auto& e : spec.entries()) {
            Point unit = zero;
            unit.set_entry(spec, e, 1.0);
            SymMatrix coeff = map(unit) - expr.constant_;
            if (coeff.dim() != expr.dim()) throw ProblemError("from_map: map changed dimension");
            if (!is_zero(coeff)) expr.terms_.push_back({e, std::move(coeff)});
        }
    }
    return expr;
}

void AffineMatrixExpr::add_term(const EntryRef& entry, const SymMatrix& coefficient) {
    if (coefficient.dim() != dim()) {
        throw linalg::DimensionError("add_term: coefficient dimension does not match expression");
    }
    auto it = std::find_if(terms_.begin(), terms_.end(), [&](const Term& t) { return t.entry == entry; });
    if (it == terms_.end()) {
        terms_.push_back({entry, coefficient});
    } else {
        it->coefficient += coefficient;
    }
}

AffineMatrixExpr AffineMatrixExpr::negated() const {
    AffineMatrixExpr out(-constant_);
    for (const auto& t : terms_) out.terms_.push_back({t.entry, -t.coefficient});
    return out;
}

// ---------------------------------------------------------------------------
// LmiProblem
// ---------------------------------------------------------------------------

LmiProblem::LmiProblem(double epsilon) : epsilon_(epsilon) {
    if (!(epsilon >= 0.0)) throw ProblemError("LmiProblem: epsilon must be nonnegative");
}

void LmiProblem::add_variable(VarSpec spec) {
    if (spec.rows == 0 || spec.cols == 0) throw ProblemError("variable " + spec.name + " has an empty shape");
    if ((spec.shape == Shape::Diagonal || spec.shape == Shape::Symmetric) && spec.rows != spec.cols) {
        throw ProblemError("variable " + spec.name + " must be square");
    }
    for (const auto& v : vars_)
        if (v.name == spec.name) throw ProblemError("duplicate variable name " + spec.name);
    vars_.push_back(std::move(spec));
}

void LmiProblem::check_entry(const EntryRef& e) const {
    const VarSpec& v = variable(e.var);
    if (!v.owns(e)) throw ProblemError("reference to undeclared entry " + describe(e));
}

void LmiProblem::add_constraint(Constraint c) {
    for (const auto& t : c.expr.terms()) check_entry(t.entry);
    constraints_.push_back(std::move(c));
}

void LmiProblem::set_objective(Objective obj) {
    for (const auto& [e, w] : obj.coefficients) check_entry(e);
    objective_ = std::move(obj);
}

const VarSpec& LmiProblem::variable(const std::string& name) const {
    for (const auto& v : vars_)
        if (v.name == name) return v;
    throw ProblemError("undeclared variable " + name);
}

const Constraint& LmiProblem::constraint(const std::string& label) const {
    for (const auto& c : constraints_)
        if (c.label == label) return c;
    throw ProblemError("no constraint labelled " + label);
}

std::size_t LmiProblem::entry_count() const {
    std::size_t n = 0;
    for (const auto& v : vars_) n += v.entry_count();
    return n;
}

double LmiProblem::objective_value(const Point& p) const {
    if (!objective_) return 0.0;
    double s = objective_->constant;
    for (const auto& [e, w] : objective_->coefficients) s += w * p.value(e);
    return s;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

SymMatrix evaluate(const AffineMatrixExpr& expr, const Point& p) {
    Matrix acc = expr.constant().full();
    for (const auto& t : expr.terms()) acc += t.coefficient.full() * p.value(t.entry);
    return SymMatrix::symmetrize(acc);
}

double margin(const AffineMatrixExpr& expr, Sense sense, const Point& p, double slack) {
    const SymMatrix m = evaluate(expr, p);
    if (sense == Sense::NegativeDefinite) return -linalg::max_eig(m) - slack;
    return linalg::min_eig(m) - slack;
}

std::vector<double> margins(const LmiProblem& problem, const Point& p) {
    std::vector<double> out;
    out.reserve(problem.constraints().size());
    for (const auto& c : problem.constraints()) out.push_back(margin(c.expr, c.sense, p, problem.slack(c)));
    return out;
}

// ---------------------------------------------------------------------------
// Standard form
// ---------------------------------------------------------------------------

StandardForm vectorize(const LmiProblem& problem) {
    StandardForm sf;
    sf.variables = problem.variables();
    for (const auto& v : problem.variables()) {
        auto es = v.entries();
        sf.entries.insert(sf.entries.end(), es.begin(), es.end());
    }
    auto index_of = [&](const EntryRef& e) {
        auto it = std::find(sf.entries.begin(), sf.entries.end(), e);
        return static_cast<std::size_t>(it - sf.entries.begin());
    };

    for (const auto& c : problem.constraints()) {
        StandardForm::Block b;
        b.label = c.label;
        b.constant = c.expr.constant();
        b.coefficients.assign(sf.entries.size(), SymMatrix(c.expr.dim()));
        for (const auto& t : c.expr.terms()) b.coefficients[index_of(t.entry)] += t.coefficient;
        b.sense = c.sense;
        b.slack = problem.slack(c);
        sf.blocks.push_back(std::move(b));
    }
    if (const auto& obj = problem.objective()) {
        Vector f(sf.entries.size(), 0.0);
        for (const auto& [e, w] : obj->coefficients) f[index_of(e)] += w;
        sf.objective = std::move(f);
        sf.objective_constant = obj->constant;
    }
    return sf;
}

SymMatrix StandardForm::evaluate_block(std::size_t b, const Vector& x) const {
    const Block& blk = blocks.at(b);
    Matrix acc = blk.constant.full();
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] != 0.0) acc += blk.coefficients[k].full() * x[k];
    return SymMatrix::symmetrize(acc);
}

Point StandardForm::to_point(const Vector& x) const {
    if (x.size() != entries.size()) throw IncompletePointError("to_point: wrong entry count");
    Point p = Point::zeros(variables);
    std::size_t k = 0;
    for (const auto& v : variables)
        for (const auto& e : v.entries()) p.set_entry(v, e, x[k++]);
    return p;
}

Vector StandardForm::from_point(const Point& p) const {
    Vector x(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) x[k] = p.value(entries[k]);
    return x;
}

} // namespace hypiss::lmi
