#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mixdisc/linalg.hpp"
#include "mixdisc/rng.hpp"

using namespace mixdisc;

namespace {

SymMatrix sym2(double a, double b, double c) {
    SymMatrix m(2);
    m.set(0, 0, a);
    m.set(0, 1, b);
    m.set(1, 1, c);
    return m;
}

SymMatrix random_pd(Rng& rng, std::size_t n, double lo = 0.5, double hi = 3.0) {
    const Matrix frame = rng.orthogonal(n);
    std::vector<double> spectrum(n);
    for (double& v : spectrum) v = rng.uniform(lo, hi);
    return congruence(SymMatrix::diagonal(spectrum), frame.transposed());
}

SymMatrix random_symmetric(Rng& rng, std::size_t n) {
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.gaussian();
    return SymMatrix::from_dense(a);
}

} // namespace

TEST_CASE("eigen_decompose on identity and diagonal matrices") {
    const EigenDecomposition id = eigen_decompose(SymMatrix::identity(3));
    REQUIRE(id.eigenvalues == std::vector<double>{1.0, 1.0, 1.0});

    const EigenDecomposition d = eigen_decompose(SymMatrix::diagonal({2.0, 5.0}));
    REQUIRE(d.eigenvalues[0] == 2.0);
    REQUIRE(d.eigenvalues[1] == 5.0);
    // Eigenvectors form a signed permutation of the standard basis.
    for (std::size_t j = 0; j < 2; ++j) {
        double max_entry = 0.0;
        for (std::size_t i = 0; i < 2; ++i)
            max_entry = std::max(max_entry, std::abs(d.eigenvectors(i, j)));
        REQUIRE(max_entry == Catch::Approx(1.0).margin(1e-14));
    }
}

TEST_CASE("eigen_decompose of [[2,1],[1,2]] gives 1 and 3") {
    // Characteristic polynomial x^2 - 4x + 3 = (x-1)(x-3).
    const EigenDecomposition d = eigen_decompose(sym2(2, 1, 2));
    REQUIRE(d.eigenvalues[0] == Catch::Approx(1.0).epsilon(1e-13));
    REQUIRE(d.eigenvalues[1] == Catch::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("eigen_decompose reconstruction and orthonormality on random input") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        Rng rng(100 + seed);
        const std::size_t n = 1 + seed % 12;
        const SymMatrix m = random_symmetric(rng, n);
        const EigenDecomposition d = eigen_decompose(m);

        double max_lambda = 0.0;
        for (double l : d.eigenvalues) max_lambda = std::max(max_lambda, std::abs(l));
        const Matrix vt = d.eigenvectors.transposed();

        const Matrix recon =
            d.eigenvectors * SymMatrix::diagonal(d.eigenvalues).dense() * vt;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                REQUIRE(std::abs(recon(i, j) - m(i, j)) <= 1e-10 * (1.0 + max_lambda));

        const Matrix gram = vt * d.eigenvectors;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                REQUIRE(std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-12);

        for (std::size_t i = 0; i + 1 < n; ++i)
            REQUIRE(d.eigenvalues[i] <= d.eigenvalues[i + 1]);
    }
}

TEST_CASE("cholesky on identity and diagonal matrices") {
    const CholeskyFactor id = cholesky(SymMatrix::identity(3));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            REQUIRE(id.lower(i, j) == (i == j ? 1.0 : 0.0));

    const CholeskyFactor d = cholesky(SymMatrix::diagonal({4.0, 9.0}));
    REQUIRE(d.lower(0, 0) == 2.0);
    REQUIRE(d.lower(1, 1) == 3.0);
    REQUIRE(d.lower(1, 0) == 0.0);
}

TEST_CASE("cholesky of [[2,1],[1,2]] matches the hand recurrence") {
    const CholeskyFactor f = cholesky(sym2(2, 1, 2));
    REQUIRE(f.lower(0, 0) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-15));
    REQUIRE(f.lower(1, 0) == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    REQUIRE(f.lower(1, 1) == Catch::Approx(std::sqrt(1.5)).epsilon(1e-15));
    REQUIRE(f.lower(0, 1) == 0.0);
}

TEST_CASE("cholesky rejects non positive definite input with the pivot index") {
    try {
        cholesky(SymMatrix::diagonal({1.0, -2.0, 3.0}));
        FAIL("expected NotPositiveDefinite");
    } catch (const NotPositiveDefinite& e) {
        REQUIRE(e.pivot_index == 1);
    }

    // Positive semidefinite but singular: rank-one 2x2.
    REQUIRE_THROWS_AS(cholesky(SymMatrix::outer({1.0, 1.0})), NotPositiveDefinite);
}

TEST_CASE("log_det basics") {
    REQUIRE(log_det(SymMatrix::identity(5)) == 0.0);
    const double e = std::exp(1.0);
    REQUIRE(log_det(SymMatrix::diagonal({e, e * e})) == Catch::Approx(3.0).epsilon(1e-14));
    REQUIRE(log_det(sym2(2, 1, 2)) == Catch::Approx(std::log(3.0)).epsilon(1e-14));
}

TEST_CASE("log_det agrees with the eigenvalue product") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(500 + seed);
        const std::size_t n = 1 + seed % 12;
        const SymMatrix m = random_pd(rng, n);
        const EigenDecomposition d = eigen_decompose(m);
        double prod = 1.0;
        for (double l : d.eigenvalues) prod *= l;
        REQUIRE(std::exp(log_det(m)) == Catch::Approx(prod).epsilon(1e-8));
    }
}

TEST_CASE("solve_spd examples") {
    const std::vector<double> v{3.0, -1.0, 2.0};
    REQUIRE(solve_spd(SymMatrix::identity(3), v) == v);

    const std::vector<double> x = solve_spd(SymMatrix::diagonal({2.0, 4.0}), std::vector<double>{2.0, 4.0});
    REQUIRE(x[0] == Catch::Approx(1.0).epsilon(1e-15));
    REQUIRE(x[1] == Catch::Approx(1.0).epsilon(1e-15));

    const std::vector<double> y = solve_spd(sym2(2, 1, 2), std::vector<double>{3.0, 3.0});
    REQUIRE(y[0] == Catch::Approx(1.0).epsilon(1e-14));
    REQUIRE(y[1] == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("solve_spd residual on random systems") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        Rng rng(900 + seed);
        const std::size_t n = 2 + seed % 10;
        const SymMatrix m = random_pd(rng, n);
        Matrix rhs(n, 3);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < 3; ++j) rhs(i, j) = rng.gaussian();
        const Matrix x = solve_spd(m, rhs);
        const Matrix resid = m.dense() * x - rhs;
        REQUIRE(resid.max_abs() <= 1e-10 * (1.0 + rhs.frobenius_norm()));
    }
}

TEST_CASE("restrict_form examples") {
    // Any 2-dim subspace of R^3: take span(e1, e3).
    Matrix b(3, 2);
    b(0, 0) = 1.0;
    b(2, 1) = 1.0;
    const SymMatrix r = restrict_form(SymMatrix::identity(3), b);
    REQUIRE(r.dim() == 2);
    REQUIRE(r(0, 0) == 1.0);
    REQUIRE(r(1, 1) == 1.0);
    REQUIRE(r(0, 1) == 0.0);

    Matrix e12(3, 2);
    e12(0, 0) = 1.0;
    e12(1, 1) = 1.0;
    const SymMatrix d = restrict_form(SymMatrix::diagonal({1.0, 2.0, 3.0}), e12);
    REQUIRE(d(0, 0) == 1.0);
    REQUIRE(d(1, 1) == 2.0);

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Matrix u(2, 1);
    u(0, 0) = inv_sqrt2;
    u(1, 0) = inv_sqrt2;
    const SymMatrix one = restrict_form(sym2(2, 1, 2), u);
    REQUIRE(one.dim() == 1);
    REQUIRE(one(0, 0) == Catch::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("restrict_form rejects a non-orthonormal basis") {
    Matrix b(3, 2);
    b(0, 0) = 1.0;
    b(0, 1) = 1.0; // second column equals the first
    REQUIRE_THROWS_AS(restrict_form(SymMatrix::identity(3), b), BasisNotOrthonormal);
}

TEST_CASE("restrict_form with the full standard basis is the identity operation") {
    Rng rng(4242);
    const std::size_t n = 6;
    const SymMatrix m = random_symmetric(rng, n);
    const SymMatrix r = restrict_form(m, Matrix::identity(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            REQUIRE(std::abs(r(i, j) - m(i, j)) <= 1e-14);
}

TEST_CASE("eigenvalues of a hyperplane restriction interlace") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(1300 + seed);
        const std::size_t n = 2 + seed % 10;
        const SymMatrix m = random_pd(rng, n);
        const Matrix basis = hyperplane_basis(rng.unit_vector(n));
        const EigenDecomposition full = eigen_decompose(m);
        const EigenDecomposition sub = eigen_decompose(restrict_form(m, basis));
        for (std::size_t k = 0; k + 1 < n; ++k) {
            REQUIRE(sub.eigenvalues[k] >= full.eigenvalues[k] - 1e-10);
            REQUIRE(sub.eigenvalues[k] <= full.eigenvalues[k + 1] + 1e-10);
        }
    }
}

TEST_CASE("hyperplane_basis spans the orthogonal complement") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(7100 + seed);
        const std::size_t n = 2 + seed % 9;
        const std::vector<double> u = rng.unit_vector(n);
        const Matrix basis = hyperplane_basis(u);
        REQUIRE(basis.cols() == n - 1);
        for (std::size_t j = 0; j + 1 < n; ++j) {
            double proj = 0.0;
            for (std::size_t i = 0; i < n; ++i) proj += basis(i, j) * u[i];
            REQUIRE(std::abs(proj) <= 1e-13);
        }
    }
    REQUIRE_THROWS_AS(hyperplane_basis({0.5, 0.5}), NotUnitVector);
}

TEST_CASE("lu_determinant handles sign changes and singular input") {
    REQUIRE(lu_determinant(Matrix::identity(4)) == 1.0);

    Matrix swap(2, 2);
    swap(0, 1) = 1.0;
    swap(1, 0) = 1.0;
    REQUIRE(lu_determinant(swap) == -1.0);

    Matrix singular(2, 2);
    singular(0, 0) = 1.0;
    singular(0, 1) = 2.0;
    singular(1, 0) = 2.0;
    singular(1, 1) = 4.0;
    REQUIRE(lu_determinant(singular) == 0.0);

    REQUIRE(lu_determinant(sym2(2, 1, 2).dense()) == Catch::Approx(3.0).epsilon(1e-15));
}
