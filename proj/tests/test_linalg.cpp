#include <doctest.h>

#include <cmath>
#include <random>

#include "hypiss/control.hpp"
#include "hypiss/linalg.hpp"

using namespace hypiss::linalg;

namespace {

// Closed-form eigenvalues of [[a, b], [b, c]], ascending.
std::pair<double, double> eig2(double a, double b, double c) {
    const double mid = 0.5 * (a + c);
    const double rad = std::hypot(0.5 * (a - c), b);
    return {mid - rad, mid + rad};
}

SymMatrix random_sym(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SymMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a.set(i, j, u(rng));
    return a;
}

double orthogonality_error(const Matrix& v) {
    const Matrix g = v.transpose() * v;
    return (g - Matrix::identity(v.cols())).max_abs();
}

} // namespace

TEST_CASE("sym_eig: identity and diagonal inputs") {
    const SymEigen e = sym_eig(SymMatrix::identity(3));
    REQUIRE(e.values.size() == 3);
    for (double v : e.values) CHECK(v == doctest::Approx(1.0));

    SymMatrix d(2);
    d.set(0, 0, -5.0);
    d.set(1, 1, 3.0);
    const SymEigen f = sym_eig(d);
    CHECK(f.values[0] == doctest::Approx(-5.0));
    CHECK(f.values[1] == doctest::Approx(3.0));
}

TEST_CASE("sym_eig: 2x2 closed form") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int k = 0; k < 200; ++k) {
        const double a = u(rng), b = u(rng), c = u(rng);
        const SymMatrix m = SymMatrix::from(Matrix{{a, b}, {b, c}});
        const auto [lo, hi] = eig2(a, b, c);
        const SymEigen e = sym_eig(m);
        CHECK(std::abs(e.values[0] - lo) <= 1e-12 * (1.0 + std::abs(lo)));
        CHECK(std::abs(e.values[1] - hi) <= 1e-12 * (1.0 + std::abs(hi)));
    }
}

TEST_CASE("sym_eig: reconstruction, orthogonality and residuals on random inputs") {
    std::mt19937_64 rng(11);
    for (std::size_t n : {1u, 2u, 4u, 6u, 10u}) {
        for (int rep = 0; rep < 20; ++rep) {
            const SymMatrix a = random_sym(rng, n);
            const SymEigen e = sym_eig(a);
            for (std::size_t i = 1; i < n; ++i) CHECK(e.values[i - 1] <= e.values[i]);
            CHECK(orthogonality_error(e.vectors) <= 1e-9);

            Matrix lam(n, n);
            for (std::size_t i = 0; i < n; ++i) lam(i, i) = e.values[i];
            const Matrix rebuilt = e.vectors * lam * e.vectors.transpose();
            CHECK((rebuilt - a.full()).max_abs() <= 1e-9);

            const double scale = a.full().frobenius_norm();
            for (std::size_t i = 0; i < n; ++i) {
                Vector v(n);
                for (std::size_t r = 0; r < n; ++r) v[r] = e.vectors(r, i);
                const Vector av = a.full() * v;
                double res = 0.0;
                for (std::size_t r = 0; r < n; ++r) res = std::max(res, std::abs(av[r] - e.values[i] * v[r]));
                CHECK(res <= 1e-10 * scale);
            }
        }
    }
}

TEST_CASE("Rayleigh quotient lies between extreme eigenvalues") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 10; ++rep) {
        const SymMatrix a = random_sym(rng, 5);
        const double lo = min_eig(a), hi = max_eig(a);
        for (int k = 0; k < 100; ++k) {
            Vector x(5);
            for (double& v : x) v = g(rng);
            const double r = dot(x, a.full() * x) / dot(x, x);
            CHECK(r >= lo - 1e-12);
            CHECK(r <= hi + 1e-12);
        }
    }
}

TEST_CASE("max_eig and min_eig") {
    CHECK(max_eig(SymMatrix(3)) == 0.0);
    CHECK(min_eig(SymMatrix(3)) == 0.0);

    const Vector v{1.0, -2.0, 2.0};
    CHECK(max_eig(SymMatrix::outer(v)) == doctest::Approx(9.0).epsilon(1e-12));

    // diag(6.25, 74.97) minus the symmetrized reference Γ̂
    const double a = 6.25 - 4.07, b = -0.195, c = 74.97 - 36.3;
    const SymMatrix m = SymMatrix::from(Matrix{{a, b}, {b, c}});
    const double expected = eig2(a, b, c).first;
    CHECK(min_eig(m) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(min_eig(m) == doctest::Approx(2.17).epsilon(0.01));
}

TEST_CASE("spectral_norm") {
    CHECK(spectral_norm(Matrix::identity(2)) == doctest::Approx(1.0));
    CHECK(spectral_norm(Matrix{{3.0, 0.0}, {0.0, -5.0}}) == doctest::Approx(5.0));

    // H + BK for the reference plant with the reported gain; oracle from the
    // closed-form eigenvalues of AᵀA.
    const Matrix a{{0.25 - 0.24, 0.0}, {-1.0 + 0.33, 0.25 - 0.08}};
    const Matrix ata = a.transpose() * a;
    const double oracle = std::sqrt(eig2(ata(0, 0), ata(0, 1), ata(1, 1)).second);
    const hypiss::control::Plant p = hypiss::control::reference_plant();
    const Matrix hcl = hypiss::control::closed_loop_matrix(p, hypiss::control::reference_gain());
    CHECK(spectral_norm(hcl) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(spectral_norm(hcl) == doctest::Approx(0.691).epsilon(2e-3));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        Matrix m(3, 5);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 5; ++j) m(i, j) = u(rng);
        CHECK(std::abs(spectral_norm(m) - spectral_norm(m.transpose())) <= 1e-12);
    }
}

TEST_CASE("solve_linear") {
    const Vector b{1.5, -2.0, 0.25};
    const Vector x = solve_linear(Matrix::identity(3), b);
    for (std::size_t i = 0; i < 3; ++i) CHECK(x[i] == b[i]);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        Matrix a(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) a(i, j) = u(rng) + (i == j ? 4.0 : 0.0);
        const Vector rhs{u(rng), u(rng), u(rng)};
        const Vector sol = solve_linear(a, rhs);
        const Vector ax = a * sol;
        double res = 0.0;
        for (std::size_t i = 0; i < 3; ++i) res += (ax[i] - rhs[i]) * (ax[i] - rhs[i]);
        CHECK(std::sqrt(res) <= 1e-10 * norm2(rhs));
    }
}

TEST_CASE("solve_linear: singular input carries a condition estimate") {
    const Matrix a{{1.0, 2.0}, {2.0, 4.0}};
    try {
        (void)solve_linear(a, Vector{1.0, 1.0});
        FAIL("expected SingularMatrixError");
    } catch (const SingularMatrixError& e) {
        CHECK(e.condition_estimate() > 1e12);
    }
}

TEST_CASE("invert_diag") {
    const DiagMatrix inv = invert_diag(DiagMatrix(Vector{12.5, 82.0}));
    CHECK(inv[0] == doctest::Approx(0.08));
    CHECK(inv[1] == doctest::Approx(1.0 / 82.0));
    CHECK_THROWS_AS(invert_diag(DiagMatrix(Vector{1.0, 0.0})), SingularMatrixError);
}

TEST_CASE("cholesky and inverse_spd") {
    const SymMatrix a = SymMatrix::from(Matrix{{4.0, 1.0, 0.5}, {1.0, 3.0, 0.2}, {0.5, 0.2, 2.0}});
    CHECK(is_positive_definite(a));
    Matrix l;
    REQUIRE(cholesky(a, l));
    CHECK((l * l.transpose() - a.full()).max_abs() <= 1e-14);
    const SymMatrix inv = inverse_spd(a);
    CHECK((a.full() * inv.full() - Matrix::identity(3)).max_abs() <= 1e-13);

    const SymMatrix indefinite = SymMatrix::from(Matrix{{1.0, 2.0}, {2.0, 1.0}});
    CHECK_FALSE(is_positive_definite(indefinite));
}

TEST_CASE("symmetric storage and block assembly") {
    CHECK_THROWS_AS(SymMatrix::from(Matrix{{1.0, 2.0}, {2.1, 1.0}}), DimensionError);
    const SymMatrix s = SymMatrix::symmetrize(Matrix{{1.0, 2.0}, {3.0, 1.0}});
    CHECK(s(0, 1) == 2.5);
    CHECK(s(1, 0) == 2.5);

    SymMatrix t(3);
    t.set(2, 0, 7.0);
    CHECK(t(0, 2) == 7.0);

    const Matrix a{{1.0}};
    const Matrix b{{2.0, 3.0}};
    const Matrix c{{4.0, 5.0}, {5.0, 6.0}};
    const SymMatrix blk = assemble_symmetric({{a, b}, {Matrix(), c}});
    REQUIRE(blk.dim() == 3);
    CHECK(blk(0, 1) == 2.0);
    CHECK(blk(2, 0) == 3.0);
    CHECK(blk(1, 2) == 5.0);
    CHECK(blk(2, 2) == 6.0);
}

TEST_CASE("dimension checks") {
    CHECK_THROWS_AS(Matrix(2, 3) * Matrix(2, 3), DimensionError);
    CHECK_THROWS_AS(Matrix(2, 2) + Matrix(3, 3), DimensionError);
    CHECK_THROWS_AS((void)(Matrix(2, 2) * Vector{1.0}), DimensionError);
}
