#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mixdisc/errors.hpp"
#include "mixdisc/linalg.hpp"
#include "mixdisc/matrix.hpp"
#include "mixdisc/rng.hpp"

namespace mixdisc {

/// Ordered n-tuple of n x n symmetric matrices (the square setting: tuple
/// length equals matrix dimension).
class MatrixTuple {
public:
    explicit MatrixTuple(std::vector<SymMatrix> matrices) : matrices_(std::move(matrices)) {
        if (matrices_.empty()) throw Error("MatrixTuple must be non-empty");
        const std::size_t n = matrices_.size();
        for (const SymMatrix& m : matrices_)
            if (m.dim() != n) throw Error("MatrixTuple requires n matrices of dimension n");
    }

    std::size_t size() const { return matrices_.size(); }
    const SymMatrix& operator[](std::size_t i) const { return matrices_[i]; }

    auto begin() const { return matrices_.begin(); }
    auto end() const { return matrices_.end(); }

    SymMatrix sum() const {
        SymMatrix s = matrices_[0];
        for (std::size_t i = 1; i < matrices_.size(); ++i) s += matrices_[i];
        return s;
    }

private:
    std::vector<SymMatrix> matrices_;
};

/// Eigenvalue extremes per matrix and the smallest alpha for which the tuple
/// is alpha-conditioned. `alpha` is meaningful only when `positive_definite`.
struct ConditionReport {
    std::vector<double> per_matrix_min;
    std::vector<double> per_matrix_max;
    bool positive_definite = false;
    double alpha = 0.0;
};

struct StochasticityReport {
    double sum_deviation = 0.0;            // max-entry |sum Q_i - I|
    std::vector<double> trace_deviations;  // |tr Q_i - 1|
    double min_eigenvalue = 0.0;           // over all matrices
    bool passes = false;
};

inline ConditionReport alpha_of(const MatrixTuple& t) {
    ConditionReport r;
    r.per_matrix_min.reserve(t.size());
    r.per_matrix_max.reserve(t.size());
    for (const SymMatrix& q : t) {
        const EigenDecomposition d = eigen_decompose(q);
        r.per_matrix_min.push_back(d.eigenvalues.front());
        r.per_matrix_max.push_back(d.eigenvalues.back());
    }
    double lo = r.per_matrix_min[0];
    double hi = r.per_matrix_max[0];
    for (std::size_t i = 1; i < t.size(); ++i) {
        lo = std::min(lo, r.per_matrix_min[i]);
        hi = std::max(hi, r.per_matrix_max[i]);
    }
    r.positive_definite = lo > 0.0;
    if (r.positive_definite) r.alpha = hi / lo;
    return r;
}

/// Tests sum Q_i = I, tr Q_i = 1 and positive semidefiniteness (eigenvalues
/// down to -tol accepted, since scaled tuples carry roundoff).
inline StochasticityReport check_doubly_stochastic(const MatrixTuple& t, double tol) {
    if (tol <= 0.0) throw Error("tolerance must be positive");
    const std::size_t n = t.size();
    StochasticityReport r;

    SymMatrix s = t.sum();
    double dev = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            dev = std::max(dev, std::abs(s(i, j) - (i == j ? 1.0 : 0.0)));
    r.sum_deviation = dev;

    double worst_trace = 0.0;
    r.trace_deviations.reserve(n);
    for (const SymMatrix& q : t) {
        const double d = std::abs(q.trace() - 1.0);
        r.trace_deviations.push_back(d);
        worst_trace = std::max(worst_trace, d);
    }

    double min_eig = eigen_decompose(t[0]).eigenvalues.front();
    for (std::size_t i = 1; i < n; ++i)
        min_eig = std::min(min_eig, eigen_decompose(t[i]).eigenvalues.front());
    r.min_eigenvalue = min_eig;

    r.passes = r.sum_deviation <= tol && worst_trace <= tol && min_eig >= -tol;
    return r;
}

/// Diagonal embedding: the i-th row of `a` becomes the diagonal of Q_i, so
/// the mixed discriminant of the tuple equals the permanent of `a`.
inline MatrixTuple from_matrix_rows(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error("from_matrix_rows requires a square matrix");
    const std::size_t n = a.rows();
    std::vector<SymMatrix> ms;
    ms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> d(n);
        for (std::size_t j = 0; j < n; ++j) d[j] = a(i, j);
        ms.push_back(SymMatrix::diagonal(d));
    }
    return MatrixTuple(std::move(ms));
}

/// Row matrix of a diagonal tuple (inverse of from_matrix_rows, diagonals only).
inline Matrix diagonal_rows(const MatrixTuple& t) {
    const std::size_t n = t.size();
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = t[i](j, j);
    return a;
}

/// Restrictions of Q_1..Q_{n-1} onto the hyperplane u^perp, using the
/// deterministic Householder basis. The n-th matrix is dropped: it plays the
/// role of the rank-one form <u,x>^2 in the dimension-reduction identity.
inline MatrixTuple restrict_tuple(const MatrixTuple& t, const std::vector<double>& u) {
    const std::size_t n = t.size();
    if (n < 2) throw Error("restrict_tuple requires n >= 2");
    if (u.size() != n) throw Error("restrict_tuple direction has wrong dimension");
    const Matrix basis = hyperplane_basis(u); // validates unit length
    std::vector<SymMatrix> ms;
    ms.reserve(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) ms.push_back(restrict_form(t[i], basis));
    return MatrixTuple(std::move(ms));
}

/// Seeded positive definite tuple with conditioning at most alpha_target:
/// per-matrix random orthogonal frames with spectra uniform in [1, alpha_target].
inline MatrixTuple random_tuple(std::size_t n, double alpha_target, std::uint64_t seed) {
    if (n < 1) throw Error("random_tuple requires n >= 1");
    if (alpha_target < 1.0) throw Error("alpha_target must be >= 1");
    Rng rng(seed);
    std::vector<SymMatrix> ms;
    ms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Matrix frame = rng.orthogonal(n);
        std::vector<double> spectrum(n);
        for (double& lam : spectrum) lam = rng.uniform(1.0, alpha_target);
        ms.push_back(congruence(SymMatrix::diagonal(spectrum), frame.transposed()));
    }
    return MatrixTuple(std::move(ms));
}

/// Rescales all matrices by one positive scalar so that sum_i tr Q_i = n.
inline MatrixTuple normalize_trace_sum(const MatrixTuple& t) {
    double total = 0.0;
    for (const SymMatrix& q : t) total += q.trace();
    if (total <= 0.0) throw Error("trace sum must be positive");
    const double c = static_cast<double>(t.size()) / total;
    std::vector<SymMatrix> ms;
    ms.reserve(t.size());
    for (const SymMatrix& q : t) ms.push_back(q * c);
    return MatrixTuple(std::move(ms));
}

} // namespace mixdisc
