#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Dense real linear algebra for the small matrices that show up in the
// synthesis conditions (dimensions are at most ~10).
namespace hypiss::linalg {

using Vector = std::vector<double>;

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMatrixError : public NumericalError {
public:
    SingularMatrixError(const std::string& what, double condition_estimate)
        : NumericalError(what), condition_estimate_(condition_estimate) {}

    [[nodiscard]] double condition_estimate() const noexcept { return condition_estimate_; }

private:
    double condition_estimate_;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Row-major dense matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);
    static Matrix identity(std::size_t n);
    static Matrix column(const Vector& v);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return std::span<const double>(data_).subspan(i * cols_, cols_);
    }
    [[nodiscard]] std::vector<std::vector<double>> to_rows() const;

    [[nodiscard]] Matrix transpose() const;
    [[nodiscard]] double frobenius_norm() const;
    [[nodiscard]] double max_abs() const;
    [[nodiscard]] bool all_finite() const;
    [[nodiscard]] bool is_symmetric(double tol = 0.0) const;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix m);
Matrix operator*(Matrix m, double s);
Matrix operator*(double s, Matrix m);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& x);

/// Symmetric matrix stored as a full matrix with mirrored entries.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n) : full_(n, n) {}

    /// Requires exact symmetry; throws DimensionError otherwise.
    static SymMatrix from(const Matrix& m);
    /// (M + Mᵀ)/2.
    static SymMatrix symmetrize(const Matrix& m);
    static SymMatrix identity(std::size_t n);
    /// vvᵀ
    static SymMatrix outer(const Vector& v);

    [[nodiscard]] std::size_t dim() const noexcept { return full_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return full_(i, j); }
    /// Writes both (i, j) and (j, i).
    void set(std::size_t i, std::size_t j, double v);
    [[nodiscard]] const Matrix& full() const noexcept { return full_; }

    SymMatrix& operator+=(const SymMatrix& rhs);
    SymMatrix& operator-=(const SymMatrix& rhs);
    SymMatrix& operator*=(double s);
    /// Adds s·I.
    [[nodiscard]] SymMatrix shifted(double s) const;

    friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

private:
    Matrix full_;
};

SymMatrix operator+(SymMatrix lhs, const SymMatrix& rhs);
SymMatrix operator-(SymMatrix lhs, const SymMatrix& rhs);
SymMatrix operator-(SymMatrix m);
SymMatrix operator*(SymMatrix m, double s);
SymMatrix operator*(double s, SymMatrix m);

class DiagMatrix {
public:
    DiagMatrix() = default;
    explicit DiagMatrix(Vector diagonal) : diag_(std::move(diagonal)) {}
    DiagMatrix(std::initializer_list<double> diagonal) : diag_(diagonal) {}

    static DiagMatrix identity(std::size_t n) { return DiagMatrix(Vector(n, 1.0)); }

    [[nodiscard]] std::size_t dim() const noexcept { return diag_.size(); }
    double operator[](std::size_t i) const { return diag_[i]; }
    [[nodiscard]] const Vector& diagonal() const noexcept { return diag_; }
    [[nodiscard]] bool is_positive() const;
    [[nodiscard]] double max() const;
    [[nodiscard]] double min() const;

    [[nodiscard]] Matrix to_matrix() const;
    [[nodiscard]] SymMatrix to_sym() const;

    friend bool operator==(const DiagMatrix&, const DiagMatrix&) = default;

private:
    Vector diag_;
};

Matrix operator*(const DiagMatrix& d, const Matrix& m);
Matrix operator*(const Matrix& m, const DiagMatrix& d);
DiagMatrix operator*(const DiagMatrix& a, const DiagMatrix& b);
DiagMatrix operator*(const DiagMatrix& d, double s);

struct EigOptions {
    double relative_tolerance = 1e-10;
    int max_sweeps = 100;
};

struct SymEigen {
    Vector values;  ///< ascending
    Matrix vectors; ///< orthonormal columns, column i pairs with values[i]
};

/// Cyclic Jacobi eigensolver.
SymEigen sym_eig(const SymMatrix& a, const EigOptions& opts = {});
double max_eig(const SymMatrix& a);
double min_eig(const SymMatrix& a);

/// Largest singular value, sqrt(λ_max(AᵀA)).
double spectral_norm(const Matrix& a);

/// Gaussian elimination with partial pivoting.
Vector solve_linear(const Matrix& a, const Vector& b);
DiagMatrix invert_diag(const DiagMatrix& d);

/// Lower-triangular Cholesky factor; returns false if a is not numerically PD.
bool cholesky(const SymMatrix& a, Matrix& lower);
bool is_positive_definite(const SymMatrix& a);
/// Inverse of an SPD matrix via Cholesky; throws NumericalError if not PD.
SymMatrix inverse_spd(const SymMatrix& a);

/// Assembles a symmetric block matrix from its upper-triangular blocks.
/// blocks[i][j] for j >= i must be present; entries below the diagonal are
/// ignored and filled by transposition. Diagonal blocks are symmetrized.
SymMatrix assemble_symmetric(const std::vector<std::vector<Matrix>>& upper_blocks);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);

} // namespace hypiss::linalg
