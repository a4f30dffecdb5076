#include "hypiss/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hypiss::linalg {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        std::ostringstream os;
        os << op << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
           << b.cols();
        throw DimensionError(os.str());
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("Matrix: entry count does not match rows*cols");
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.front().size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw DimensionError("Matrix::from_rows: ragged rows");
        data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::column(const Vector& v) { return Matrix(v.size(), 1, v); }

std::vector<std::vector<double>> Matrix::to_rows() const {
    std::vector<std::vector<double>> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
    return out;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

bool Matrix::is_symmetric(double tol) const {
    if (!is_square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i + 1; j < cols_; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    require_same_shape(*this, rhs, "operator+");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    require_same_shape(*this, rhs, "operator-");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator-(Matrix m) { return m *= -1.0; }
Matrix operator*(Matrix m, double s) { return m *= s; }
Matrix operator*(double s, Matrix m) { return m *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("operator*: inner dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vector operator*(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) throw DimensionError("operator*: matrix-vector mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

// ---------------------------------------------------------------------------
// SymMatrix
// ---------------------------------------------------------------------------

SymMatrix SymMatrix::from(const Matrix& m) {
    if (!m.is_symmetric(0.0)) throw DimensionError("SymMatrix::from: matrix is not exactly symmetric");
    SymMatrix s;
    s.full_ = m;
    return s;
}

SymMatrix SymMatrix::symmetrize(const Matrix& m) {
    if (!m.is_square()) throw DimensionError("SymMatrix::symmetrize: matrix is not square");
    SymMatrix s(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    return s;
}

SymMatrix SymMatrix::identity(std::size_t n) { return from(Matrix::identity(n)); }

SymMatrix SymMatrix::outer(const Vector& v) {
    SymMatrix s(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i; j < v.size(); ++j) s.set(i, j, v[i] * v[j]);
    return s;
}

void SymMatrix::set(std::size_t i, std::size_t j, double v) {
    full_(i, j) = v;
    full_(j, i) = v;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& rhs) {
    full_ += rhs.full_;
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& rhs) {
    full_ -= rhs.full_;
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
    full_ *= s;
    return *this;
}

SymMatrix SymMatrix::shifted(double s) const {
    SymMatrix out = *this;
    for (std::size_t i = 0; i < dim(); ++i) out.full_(i, i) += s;
    return out;
}

SymMatrix operator+(SymMatrix lhs, const SymMatrix& rhs) { return lhs += rhs; }
SymMatrix operator-(SymMatrix lhs, const SymMatrix& rhs) { return lhs -= rhs; }
SymMatrix operator-(SymMatrix m) { return m *= -1.0; }
SymMatrix operator*(SymMatrix m, double s) { return m *= s; }
SymMatrix operator*(double s, SymMatrix m) { return m *= s; }

// ---------------------------------------------------------------------------
// DiagMatrix
// ---------------------------------------------------------------------------

bool DiagMatrix::is_positive() const {
    return std::all_of(diag_.begin(), diag_.end(), [](double v) { return v > 0.0; });
}

double DiagMatrix::max() const { return *std::max_element(diag_.begin(), diag_.end()); }
double DiagMatrix::min() const { return *std::min_element(diag_.begin(), diag_.end()); }

Matrix DiagMatrix::to_matrix() const {
    Matrix m(dim(), dim());
    for (std::size_t i = 0; i < dim(); ++i) m(i, i) = diag_[i];
    return m;
}

SymMatrix DiagMatrix::to_sym() const { return SymMatrix::from(to_matrix()); }

Matrix operator*(const DiagMatrix& d, const Matrix& m) {
    if (d.dim() != m.rows()) throw DimensionError("diag*matrix: dimension mismatch");
    Matrix out = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) *= d[i];
    return out;
}

Matrix operator*(const Matrix& m, const DiagMatrix& d) {
    if (d.dim() != m.cols()) throw DimensionError("matrix*diag: dimension mismatch");
    Matrix out = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) *= d[j];
    return out;
}

DiagMatrix operator*(const DiagMatrix& a, const DiagMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("diag*diag: dimension mismatch");
    Vector v(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) v[i] = a[i] * b[i];
    return DiagMatrix(std::move(v));
}

DiagMatrix operator*(const DiagMatrix& d, double s) {
    Vector v = d.diagonal();
    for (double& x : v) x *= s;
    return DiagMatrix(std::move(v));
}

// ---------------------------------------------------------------------------
// Eigenvalues
// ---------------------------------------------------------------------------

SymEigen sym_eig(const SymMatrix& input, const EigOptions& opts) {
    const std::size_t n = input.dim();
    if (!input.full().all_finite()) throw NumericalError("sym_eig: non-finite input");

    Matrix a = input.full();
    Matrix v = Matrix::identity(n);

    const double scale = a.frobenius_norm();
    // Off-diagonal mass is driven well below the requested relative tolerance
    // so eigenpair residuals land around machine precision.
    const double target = scale * opts.relative_tolerance * 1e-5;

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    int sweep = 0;
    while (scale > 0.0 && off_norm() > target) {
        if (++sweep > opts.max_sweeps) {
            throw NumericalError("sym_eig: Jacobi sweeps did not converge");
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    SymEigen out{Vector(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

double max_eig(const SymMatrix& a) {
    if (a.dim() == 0) return 0.0;
    return sym_eig(a).values.back();
}

double min_eig(const SymMatrix& a) {
    if (a.dim() == 0) return 0.0;
    return sym_eig(a).values.front();
}

double spectral_norm(const Matrix& a) {
    if (a.empty()) return 0.0;
    const Matrix ata = a.transpose() * a;
    return std::sqrt(std::max(0.0, max_eig(SymMatrix::symmetrize(ata))));
}

// ---------------------------------------------------------------------------
// Linear systems
// ---------------------------------------------------------------------------

Vector solve_linear(const Matrix& a, const Vector& b) {
    const std::size_t n = a.rows();
    if (!a.is_square() || b.size() != n) throw DimensionError("solve_linear: dimension mismatch");

    Matrix lu = a;
    Vector x = b;
    const double scale = std::max(a.max_abs(), std::numeric_limits<double>::min());
    double min_pivot = std::numeric_limits<double>::infinity();

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
        min_pivot = std::min(min_pivot, std::abs(lu(piv, k)));
        if (std::abs(lu(piv, k)) <= scale * 1e-14) {
            throw SingularMatrixError("solve_linear: matrix is singular to working precision",
                                      scale / std::max(std::abs(lu(piv, k)), 1e-300));
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
            std::swap(x[k], x[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu(i, k) / lu(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
            x[i] -= f * x[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        double s = x[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= lu(k, j) * x[j];
        x[k] = s / lu(k, k);
    }
    return x;
}

DiagMatrix invert_diag(const DiagMatrix& d) {
    Vector inv(d.dim());
    for (std::size_t i = 0; i < d.dim(); ++i) {
        if (d[i] == 0.0) {
            throw SingularMatrixError("invert_diag: zero diagonal entry",
                                      std::numeric_limits<double>::infinity());
        }
        inv[i] = 1.0 / d[i];
    }
    return DiagMatrix(std::move(inv));
}

bool cholesky(const SymMatrix& a, Matrix& lower) {
    const std::size_t n = a.dim();
    lower = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
        if (!(d > 0.0)) return false;
        const double ljj = std::sqrt(d);
        lower(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
            lower(i, j) = s / ljj;
        }
    }
    return true;
}

bool is_positive_definite(const SymMatrix& a) {
    Matrix l;
    return cholesky(a, l);
}

SymMatrix inverse_spd(const SymMatrix& a) {
    const std::size_t n = a.dim();
    Matrix l;
    if (!cholesky(a, l)) throw NumericalError("inverse_spd: matrix is not positive definite");

    // Invert L, then A⁻¹ = L⁻ᵀ L⁻¹.
    Matrix linv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        linv(j, j) = 1.0 / l(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = j; k < i; ++k) s -= l(i, k) * linv(k, j);
            linv(i, j) = s / l(i, i);
        }
    }
    SymMatrix inv(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = j; k < n; ++k) s += linv(k, i) * linv(k, j);
            inv.set(i, j, s);
        }
    return inv;
}

SymMatrix assemble_symmetric(const std::vector<std::vector<Matrix>>& blocks) {
    const std::size_t nb = blocks.size();
    std::vector<std::size_t> sizes(nb), offsets(nb + 1, 0);
    for (std::size_t i = 0; i < nb; ++i) {
        if (blocks[i].size() != nb) throw DimensionError("assemble_symmetric: block row count mismatch");
        sizes[i] = blocks[i][i].rows();
        offsets[i + 1] = offsets[i] + sizes[i];
    }
    SymMatrix out(offsets[nb]);
    for (std::size_t bi = 0; bi < nb; ++bi) {
        for (std::size_t bj = bi; bj < nb; ++bj) {
            const Matrix& blk = blocks[bi][bj];
            if (blk.rows() != sizes[bi] || blk.cols() != sizes[bj]) {
                std::ostringstream os;
                os << "assemble_symmetric: block (" << bi << "," << bj << ") has shape " << blk.rows()
                   << "x" << blk.cols() << ", expected " << sizes[bi] << "x" << sizes[bj];
                throw DimensionError(os.str());
            }
            for (std::size_t i = 0; i < sizes[bi]; ++i)
                for (std::size_t j = 0; j < sizes[bj]; ++j) {
                    const std::size_t r = offsets[bi] + i;
                    const std::size_t c = offsets[bj] + j;
                    if (bi == bj) {
                        if (j < i) continue;
                        out.set(r, c, 0.5 * (blk(i, j) + blk(j, i)));
                    } else {
                        out.set(r, c, blk(i, j));
                    }
                }
        }
    }
    return out;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

} // namespace hypiss::linalg
