#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mixdisc/scaling.hpp"

using namespace mixdisc;

namespace {

MatrixTuple uniform_tuple(std::size_t n) {
    return MatrixTuple(
        std::vector<SymMatrix>(n, SymMatrix::identity(n) * (1.0 / double(n))));
}

std::vector<double> project_sum_zero(std::vector<double> x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (double& v : x) v -= mean;
    return x;
}

} // namespace

TEST_CASE("objective_f at the origin is ln det of the sum") {
    REQUIRE(objective_f(uniform_tuple(4), std::vector<double>(4, 0.0)) ==
            Catch::Approx(0.0).margin(1e-13));

    const MatrixTuple t = random_tuple(5, 2.0, 11);
    const double f0 = objective_f(t, std::vector<double>(5, 0.0));
    REQUIRE(f0 == Catch::Approx(log_det(t.sum())).margin(1e-12));
}

TEST_CASE("objective_f shifts by n*c along the all-ones direction") {
    const MatrixTuple t = random_tuple(4, 3.0, 12);
    Rng rng(77);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> x(4);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        const double c = rng.uniform(-2.0, 2.0);
        std::vector<double> shifted = x;
        for (double& v : shifted) v += c;
        REQUIRE(objective_f(t, shifted) ==
                Catch::Approx(objective_f(t, x) + 4.0 * c).margin(1e-10));
    }
}

TEST_CASE("gradient_f is all ones at the uniform tuple and sums to n") {
    const std::vector<double> g = gradient_f(uniform_tuple(5), std::vector<double>(5, 0.0));
    for (double v : g) REQUIRE(v == Catch::Approx(1.0).margin(1e-13));

    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        Rng rng(7300 + seed);
        const std::size_t n = 2 + seed % 7;
        const MatrixTuple t = random_tuple(n, 3.0, 600 + seed);
        std::vector<double> x(n);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        const std::vector<double> grad = gradient_f(t, x);
        double sum = 0.0;
        for (double v : grad) {
            REQUIRE(v > 0.0);
            sum += v;
        }
        REQUIRE(sum == Catch::Approx(double(n)).margin(1e-9));
    }
}

TEST_CASE("gradient_f matches central finite differences") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        Rng rng(7700 + seed);
        const std::size_t n = 2 + seed % 5;
        const MatrixTuple t = random_tuple(n, 2.5, 650 + seed);
        std::vector<double> x(n);
        for (double& v : x) v = rng.uniform(-0.7, 0.7);
        const std::vector<double> grad = gradient_f(t, x);
        const double h = 1e-5;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> hi = x;
            std::vector<double> lo = x;
            hi[i] += h;
            lo[i] -= h;
            const double fd = (objective_f(t, hi) - objective_f(t, lo)) / (2.0 * h);
            REQUIRE(std::abs(grad[i] - fd) <= 1e-6);
        }
    }
}

TEST_CASE("f is convex along segments of the sum-zero hyperplane") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        Rng rng(8100 + seed);
        const std::size_t n = 3 + seed % 5;
        const MatrixTuple t = random_tuple(n, 3.0, 700 + seed);
        const std::vector<double> x = project_sum_zero(rng.gaussian_vector(n));
        const std::vector<double> y = project_sum_zero(rng.gaussian_vector(n));
        const double lam = rng.uniform(0.05, 0.95);
        std::vector<double> mid(n);
        for (std::size_t i = 0; i < n; ++i) mid[i] = lam * x[i] + (1.0 - lam) * y[i];
        REQUIRE(objective_f(t, mid) <=
                lam * objective_f(t, x) + (1.0 - lam) * objective_f(t, y) + 1e-9);
    }
}

TEST_CASE("scaling a doubly stochastic tuple is the identity") {
    const ScalingResult r = scale_to_doubly_stochastic(uniform_tuple(4));
    REQUIRE(r.iterations == 0);
    for (double v : r.xi) REQUIRE(std::abs(v) <= 1e-12);
    for (double v : r.tau) REQUIRE(v == Catch::Approx(1.0).margin(1e-12));
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            REQUIRE(std::abs(r.scaled[0](i, j) - (i == j ? 0.25 : 0.0)) <= 1e-10);
    REQUIRE(std::abs(r.log_det_T) <= 1e-12);
}

TEST_CASE("scaling the embedded 2x2 matrix reproduces its Sinkhorn fixed point") {
    Matrix a(2, 2);
    a(0, 0) = 2.0;
    a(0, 1) = 1.0;
    a(1, 0) = 1.0;
    a(1, 1) = 2.0;
    const ScalingResult r = scale_to_doubly_stochastic(from_matrix_rows(a));
    const Matrix b = diagonal_rows(r.scaled);
    REQUIRE(b(0, 0) == Catch::Approx(2.0 / 3.0).epsilon(1e-9));
    REQUIRE(b(0, 1) == Catch::Approx(1.0 / 3.0).epsilon(1e-9));
    REQUIRE(b(1, 0) == Catch::Approx(1.0 / 3.0).epsilon(1e-9));
    REQUIRE(b(1, 1) == Catch::Approx(2.0 / 3.0).epsilon(1e-9));

    // Off-diagonals of the scaled matrices stay zero: T is diagonal here.
    REQUIRE(std::abs(r.scaled[0](0, 1)) <= 1e-12);

    REQUIRE(mixed_discriminant(r.scaled).value ==
            Catch::Approx(5.0 / 9.0).epsilon(1e-9));
}

TEST_CASE("scaling converges on random conditioned tuples") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const std::size_t n = 8;
        const MatrixTuple t = random_tuple(n, 3.0, 7000 + seed);
        const ScalingResult r = scale_to_doubly_stochastic(t);
        REQUIRE(r.residual <= 1e-10);
        REQUIRE(r.iterations <= 500);

        const StochasticityReport ds = check_doubly_stochastic(r.scaled, 1e-9);
        REQUIRE(ds.passes);

        double xi_sum = 0.0;
        double tau_prod = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            xi_sum += r.xi[i];
            tau_prod *= r.tau[i];
            REQUIRE(r.tau[i] == std::exp(r.xi[i]));
        }
        REQUIRE(std::abs(xi_sum) <= 1e-12);
        REQUIRE(std::abs(tau_prod - 1.0) <= 1e-12);

        // (det T)^2 = 1/det(sum e^xi Q): 2 log|det T| = -f(xi).
        REQUIRE(2.0 * r.log_det_T == Catch::Approx(-objective_f(t, r.xi)).margin(1e-9));
    }
}

TEST_CASE("scaling rejects tuples that are not positive definite") {
    const MatrixTuple t(
        {SymMatrix::diagonal({1.0, 0.0}), SymMatrix::diagonal({1.0, 1.0})});
    REQUIRE_THROWS_AS(scale_to_doubly_stochastic(t), NotPositiveDefinite);
}

TEST_CASE("scaling reports no convergence with the best iterate attached") {
    SolverConfig cfg;
    cfg.max_iterations = 1;
    cfg.trace_tol = 1e-14;
    const MatrixTuple t = random_tuple(6, 4.0, 31337);
    try {
        scale_to_doubly_stochastic(t, cfg);
        FAIL("expected NoConvergence");
    } catch (const NoConvergence& e) {
        REQUIRE(e.best_xi.size() == 6);
        REQUIRE(e.residual > 0.0);
        REQUIRE(e.iterations == 1);
    }
}

TEST_CASE("the objective decreases across accepted iterations") {
    // Re-run the descent externally: evaluate f along the iterates by scaling
    // with increasing iteration caps.
    const MatrixTuple t = random_tuple(6, 3.0, 515);
    double previous = objective_f(t, [&] {
        std::vector<double> x(6);
        for (std::size_t i = 0; i < 6; ++i) x[i] = -std::log(t[i].trace());
        return project_sum_zero(x);
    }());
    for (int cap = 1; cap <= 8; ++cap) {
        SolverConfig cfg;
        cfg.max_iterations = cap;
        cfg.trace_tol = 1e-15; // force the cap to bind
        double value = 0.0;
        try {
            value = objective_f(t, scale_to_doubly_stochastic(t, cfg).xi);
        } catch (const NoConvergence& e) {
            value = objective_f(t, e.best_xi);
        }
        REQUIRE(value <= previous + 1e-12);
        previous = value;
    }
}

TEST_CASE("trace residual equals the gradient shift at convergence") {
    const MatrixTuple t = random_tuple(7, 2.0, 616);
    const ScalingResult r = scale_to_doubly_stochastic(t);
    const std::vector<double> grad = gradient_f(t, r.xi);
    double mean = 0.0;
    for (double g : grad) mean += g;
    mean /= 7.0;
    for (std::size_t i = 0; i < 7; ++i) {
        REQUIRE(std::abs(grad[i] - 1.0) <= r.residual + 1e-12);
        REQUIRE(std::abs(grad[i] - mean) <= 1e-10); // projected gradient at optimum
        REQUIRE(std::abs(r.scaled[i].trace() - 1.0 - (grad[i] - 1.0)) <= 1e-9);
    }
}

TEST_CASE("restriction traces of conditioned trace-1 forms obey the two-sided bound") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(8800 + seed);
        const std::size_t n = 2 + seed % 12;
        const Matrix frame = rng.orthogonal(n);
        std::vector<double> spectrum(n);
        for (double& v : spectrum) v = rng.uniform(1.0, 4.0);
        SymMatrix q = congruence(SymMatrix::diagonal(spectrum), frame.transposed());
        q *= 1.0 / q.trace();

        const EigenDecomposition d = eigen_decompose(q);
        const double alpha = d.eigenvalues.back() / d.eigenvalues.front();
        const double tr_hat =
            restrict_form(q, hyperplane_basis(rng.unit_vector(n))).trace();
        REQUIRE(tr_hat >= 1.0 - alpha / double(n) - 1e-10);
        REQUIRE(tr_hat <= 1.0 - 1.0 / (alpha * double(n)) + 1e-10);
    }
}

TEST_CASE("verify_lemma22 holds on trace-normalized tuples") {
    // Doubly stochastic input: scaling is the identity, values match.
    const auto [before, after] = verify_lemma22(uniform_tuple(3));
    REQUIRE(after.value == Catch::Approx(before.value).epsilon(1e-9));
    REQUIRE(before.value == Catch::Approx(2.0 / 9.0).epsilon(1e-12));

    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const std::size_t n = 3 + seed % 4;
        const MatrixTuple t = normalize_trace_sum(random_tuple(n, 3.0, 9100 + seed));
        const auto [d_before, d_after] = verify_lemma22(t);
        REQUIRE(d_after.value >= d_before.value * (1.0 - 1e-8));
    }

    // Permanent comparison through the diagonal embedding.
    Matrix a(2, 2);
    a(0, 0) = 2.0;
    a(0, 1) = 1.0;
    a(1, 0) = 1.0;
    a(1, 1) = 2.0;
    const MatrixTuple embedded = normalize_trace_sum(from_matrix_rows(a));
    const auto [pb, pa] = verify_lemma22(embedded);
    REQUIRE(pb.value == Catch::Approx(permanent_ryser(diagonal_rows(embedded)))
                            .epsilon(1e-10));
    REQUIRE(pa.value >= pb.value * (1.0 - 1e-8));
}

TEST_CASE("verify_lemma22 rejects tuples whose traces do not sum to n") {
    REQUIRE_THROWS_AS(verify_lemma22(MatrixTuple(
                          {SymMatrix::identity(2), SymMatrix::identity(2)})),
                      Error);
}

TEST_CASE("verify_lemma24 bounds the scaled conditioning by alpha^4") {
    const MatrixTuple iso({SymMatrix::identity(3) * 2.0, SymMatrix::identity(3) * 2.0,
                           SymMatrix::identity(3) * 2.0});
    const auto [ain, aout] = verify_lemma24(iso);
    REQUIRE(ain == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(aout == Catch::Approx(1.0).epsilon(1e-9));

    const auto [a2_in, a2_out] = verify_lemma24(random_tuple(6, 2.0, 777));
    REQUIRE(a2_out <= 16.0 * (1.0 + 1e-6));

    const auto [a3_in, a3_out] = verify_lemma24(random_tuple(8, 3.0, 778));
    REQUIRE(a3_out <= 81.0 * (1.0 + 1e-6));
}
