#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypiss/linalg.hpp"

// Affine symmetric-matrix inequalities over structured decision variables.
namespace hypiss::lmi {

using linalg::Matrix;
using linalg::SymMatrix;
using linalg::Vector;

class IncompletePointError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ProblemError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Shape { Scalar, Diagonal, Full, Symmetric };

/// One scalar entry of a decision variable. Diagonal entries use (i, i);
/// symmetric entries use the upper triangle (row <= col).
struct EntryRef {
    std::string var;
    std::size_t row = 0;
    std::size_t col = 0;

    friend auto operator<=>(const EntryRef&, const EntryRef&) = default;
};

struct VarSpec {
    std::string name;
    Shape shape = Shape::Scalar;
    std::size_t rows = 1;
    std::size_t cols = 1;

    static VarSpec scalar(std::string name) { return {std::move(name), Shape::Scalar, 1, 1}; }
    static VarSpec diagonal(std::string name, std::size_t n) { return {std::move(name), Shape::Diagonal, n, n}; }
    static VarSpec full(std::string name, std::size_t r, std::size_t c) {
        return {std::move(name), Shape::Full, r, c};
    }
    static VarSpec symmetric(std::string name, std::size_t n) {
        return {std::move(name), Shape::Symmetric, n, n};
    }

    [[nodiscard]] std::size_t entry_count() const;
    /// Entries in canonical (row-major, upper-triangle for symmetric) order.
    [[nodiscard]] std::vector<EntryRef> entries() const;
    [[nodiscard]] bool owns(const EntryRef& e) const;
};

/// Values for every declared variable, each stored as its full matrix
/// (scalars as 1x1, diagonal variables with zero off-diagonal entries).
class Point {
public:
    Point() = default;

    static Point zeros(const std::vector<VarSpec>& vars);

    void set(const std::string& name, Matrix value);
    void set_entry(const VarSpec& spec, const EntryRef& e, double v);
    [[nodiscard]] bool has(const std::string& name) const { return values_.contains(name); }
    [[nodiscard]] const Matrix& at(const std::string& name) const;
    [[nodiscard]] double value(const EntryRef& e) const;
    [[nodiscard]] double scalar(const std::string& name) const { return value({name, 0, 0}); }
    [[nodiscard]] linalg::DiagMatrix diag(const std::string& name) const;
    [[nodiscard]] SymMatrix sym(const std::string& name) const;

    [[nodiscard]] const std::map<std::string, Matrix>& values() const noexcept { return values_; }

private:
    std::map<std::string, Matrix> values_;
};

struct Term {
    EntryRef entry;
    SymMatrix coefficient;
};

/// constant + Σ value(entry)·coefficient
class AffineMatrixExpr {
public:
    AffineMatrixExpr() = default;
    explicit AffineMatrixExpr(SymMatrix constant) : constant_(std::move(constant)) {}

    /// Extracts the affine structure of `map` by probing it at the zero point
    /// and at each unit entry. `map` must be affine in the variable values.
    static AffineMatrixExpr from_map(const std::vector<VarSpec>& vars,
                                     const std::function<SymMatrix(const Point&)>& map);

    [[nodiscard]] std::size_t dim() const noexcept { return constant_.dim(); }
    [[nodiscard]] const SymMatrix& constant() const noexcept { return constant_; }
    [[nodiscard]] const std::vector<Term>& terms() const noexcept { return terms_; }

    /// Adds coefficient to the entry's existing term (or creates one).
    void add_term(const EntryRef& entry, const SymMatrix& coefficient);
    [[nodiscard]] AffineMatrixExpr negated() const;

private:
    SymMatrix constant_;
    std::vector<Term> terms_;
};

enum class Sense {
    NegativeDefinite, ///< expr ⪯ −εI
    PositiveDefinite, ///< expr ⪰ +εI
};

struct Constraint {
    std::string label;
    AffineMatrixExpr expr;
    Sense sense = Sense::NegativeDefinite;
    /// Non-strict constraints ignore the problem's ε.
    bool strict = true;
};

struct Objective {
    std::vector<std::pair<EntryRef, double>> coefficients;
    double constant = 0.0;
};

class LmiProblem {
public:
    explicit LmiProblem(double epsilon = 1e-6);

    void add_variable(VarSpec spec);
    void add_constraint(Constraint c);
    void set_objective(Objective obj);

    [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
    [[nodiscard]] double slack(const Constraint& c) const noexcept { return c.strict ? epsilon_ : 0.0; }
    [[nodiscard]] const std::vector<VarSpec>& variables() const noexcept { return vars_; }
    [[nodiscard]] const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
    [[nodiscard]] const std::optional<Objective>& objective() const noexcept { return objective_; }
    [[nodiscard]] const VarSpec& variable(const std::string& name) const;
    [[nodiscard]] const Constraint& constraint(const std::string& label) const;
    [[nodiscard]] std::size_t entry_count() const;

    [[nodiscard]] double objective_value(const Point& p) const;

private:
    void check_entry(const EntryRef& e) const;

    double epsilon_;
    std::vector<VarSpec> vars_;
    std::vector<Constraint> constraints_;
    std::optional<Objective> objective_;
};

/// constant + Σ value·coefficient, symmetrized.
SymMatrix evaluate(const AffineMatrixExpr& expr, const Point& p);

/// Positive when the constraint holds strictly:
///   ⪯ −εI : −λ_max(expr) − slack
///   ⪰ +εI :  λ_min(expr) − slack
double margin(const AffineMatrixExpr& expr, Sense sense, const Point& p, double slack);

/// One margin per constraint, in declaration order.
std::vector<double> margins(const LmiProblem& problem, const Point& p);

/// Scalar-entry description used by the solver: each block is
/// constant + Σ x_k·coefficients[k] with one (possibly zero) coefficient per
/// decision entry.
struct StandardForm {
    struct Block {
        std::string label;
        SymMatrix constant;
        std::vector<SymMatrix> coefficients;
        Sense sense = Sense::NegativeDefinite;
        double slack = 0.0;
    };

    std::vector<VarSpec> variables;
    std::vector<EntryRef> entries;
    std::vector<Block> blocks;
    std::optional<Vector> objective;
    double objective_constant = 0.0;

    [[nodiscard]] std::size_t entry_count() const noexcept { return entries.size(); }
    [[nodiscard]] SymMatrix evaluate_block(std::size_t b, const Vector& x) const;
    [[nodiscard]] Point to_point(const Vector& x) const;
    [[nodiscard]] Vector from_point(const Point& p) const;
};

StandardForm vectorize(const LmiProblem& problem);

} // namespace hypiss::lmi
