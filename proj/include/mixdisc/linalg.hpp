#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mixdisc/errors.hpp"
#include "mixdisc/matrix.hpp"

namespace mixdisc {

struct EigenDecomposition {
    std::vector<double> eigenvalues; // ascending
    Matrix eigenvectors;             // orthonormal columns, paired with eigenvalues
};

struct CholeskyFactor {
    Matrix lower; // strictly positive diagonal
};

namespace detail {

inline double offdiag_frobenius(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
}

} // namespace detail

/// Cyclic Jacobi eigensolver. Sweeps all (p,q) pairs until the off-diagonal
/// Frobenius norm drops below 1e-13 times the initial Frobenius norm,
/// capped at 100 sweeps.
inline EigenDecomposition eigen_decompose(const SymMatrix& m) {
    const std::size_t n = m.dim();
    Matrix a = m.dense();
    Matrix v = Matrix::identity(n);

    const double threshold = 1e-13 * a.frobenius_norm();
    constexpr int max_sweeps = 100;

    double off = detail::offdiag_frobenius(a);
    int sweep = 0;
    while (off > threshold) {
        if (sweep++ >= max_sweeps)
            throw NumericalFailure("Jacobi eigensolver did not converge", off);
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k != p && k != q) {
                        const double akp = a(k, p);
                        const double akq = a(k, q);
                        a(k, p) = c * akp - s * akq;
                        a(p, k) = a(k, p);
                        a(k, q) = s * akp + c * akq;
                        a(q, k) = a(k, q);
                    }
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        off = detail::offdiag_frobenius(a);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&a](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    EigenDecomposition d;
    d.eigenvalues.resize(n);
    d.eigenvectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        d.eigenvalues[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) d.eigenvectors(i, j) = v(i, order[j]);
    }
    return d;
}

/// Lower Cholesky factor of a positive definite matrix. A pivot at or below
/// 1e-13 times the largest diagonal entry is a failure, never clamped.
inline CholeskyFactor cholesky(const SymMatrix& m) {
    const std::size_t n = m.dim();
    double max_diag = m(0, 0);
    for (std::size_t i = 1; i < n; ++i) max_diag = std::max(max_diag, m(i, i));
    const double pivot_tol = 1e-13 * max_diag;

    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = m(j, j);
        for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        if (pivot <= pivot_tol) throw NotPositiveDefinite(j, pivot);
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return CholeskyFactor{std::move(l)};
}

inline double log_det(const SymMatrix& m) {
    const CholeskyFactor f = cholesky(m);
    double s = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) s += std::log(f.lower(i, i));
    return 2.0 * s;
}

/// Solves L x = b in place for each column of b (forward substitution).
inline Matrix solve_lower(const Matrix& l, Matrix b) {
    const std::size_t n = l.rows();
    for (std::size_t col = 0; col < b.cols(); ++col) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = b(i, col);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b(k, col);
            b(i, col) = s / l(i, i);
        }
    }
    return b;
}

/// Solves U x = b in place for each column of b (back substitution).
inline Matrix solve_upper(const Matrix& u, Matrix b) {
    const std::size_t n = u.rows();
    for (std::size_t col = 0; col < b.cols(); ++col) {
        for (std::size_t ii = n; ii-- > 0;) {
            double s = b(ii, col);
            for (std::size_t k = ii + 1; k < n; ++k) s -= u(ii, k) * b(k, col);
            b(ii, col) = s / u(ii, ii);
        }
    }
    return b;
}

inline Matrix solve_spd(const SymMatrix& m, const Matrix& rhs) {
    if (rhs.rows() != m.dim()) throw Error("solve_spd shape mismatch");
    const CholeskyFactor f = cholesky(m);
    return solve_upper(f.lower.transposed(), solve_lower(f.lower, rhs));
}

inline std::vector<double> solve_spd(const SymMatrix& m, const std::vector<double>& rhs) {
    Matrix b(rhs.size(), 1);
    for (std::size_t i = 0; i < rhs.size(); ++i) b(i, 0) = rhs[i];
    const Matrix x = solve_spd(m, b);
    std::vector<double> out(rhs.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) out[i] = x(i, 0);
    return out;
}

/// basis^T * m * basis without any orthonormality requirement.
inline SymMatrix congruence(const SymMatrix& m, const Matrix& t) {
    if (t.rows() != m.dim()) throw Error("congruence shape mismatch");
    return SymMatrix::from_dense(t.transposed() * m.dense() * t);
}

/// Restriction of a quadratic form onto the subspace spanned by the columns
/// of `basis`. Columns must be orthonormal to 1e-10; the restricted form's
/// mixed discriminants do not depend on which orthonormal basis is chosen.
inline SymMatrix restrict_form(const SymMatrix& m, const Matrix& basis) {
    if (basis.rows() != m.dim() || basis.cols() > m.dim())
        throw Error("restrict_form shape mismatch");
    const Matrix gram = basis.transposed() * basis;
    double dev = 0.0;
    for (std::size_t i = 0; i < gram.rows(); ++i)
        for (std::size_t j = 0; j < gram.cols(); ++j)
            dev = std::max(dev, std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)));
    if (dev > 1e-10) throw BasisNotOrthonormal(dev);
    return congruence(m, basis);
}

/// Orthonormal basis of the hyperplane u^perp, as the first n-1 columns of
/// the Householder reflection exchanging e_n with -sign(u_n) u. Deterministic
/// in u; requires n >= 2 and a unit u (checked to 1e-12).
inline Matrix hyperplane_basis(const std::vector<double>& u) {
    const std::size_t n = u.size();
    if (n < 2) throw Error("hyperplane_basis requires dimension >= 2");
    const double nrm = norm2(u);
    if (std::abs(nrm - 1.0) > 1e-12) throw NotUnitVector(nrm);

    const double sign = u[n - 1] >= 0.0 ? 1.0 : -1.0;
    std::vector<double> v = u;
    v[n - 1] += sign;
    const double vnorm2 = dot(v, v);

    Matrix basis(n, n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double scale = 2.0 * v[j] / vnorm2;
        for (std::size_t i = 0; i < n; ++i)
            basis(i, j) = (i == j ? 1.0 : 0.0) - scale * v[i];
    }
    return basis;
}

/// Determinant via LU with partial pivoting; accumulates in extended
/// precision so deep alternating cancellations downstream stay accurate.
inline double lu_determinant(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error("determinant requires a square matrix");
    const std::size_t n = a.rows();
    std::vector<long double> w(n * n);
    for (std::size_t k = 0; k < n * n; ++k) w[k] = a.data()[k];

    long double det = 1.0L;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        long double best = std::abs(w[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const long double cand = std::abs(w[i * n + k]);
            if (cand > best) {
                best = cand;
                piv = i;
            }
        }
        if (best == 0.0L) return 0.0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(w[k * n + j], w[piv * n + j]);
            det = -det;
        }
        const long double pivot = w[k * n + k];
        det *= pivot;
        for (std::size_t i = k + 1; i < n; ++i) {
            const long double factor = w[i * n + k] / pivot;
            if (factor == 0.0L) continue;
            for (std::size_t j = k + 1; j < n; ++j) w[i * n + j] -= factor * w[k * n + j];
        }
    }
    return static_cast<double>(det);
}

namespace detail {

inline long double lu_determinant_ld(std::vector<long double>& w, std::size_t n) {
    long double det = 1.0L;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        long double best = std::abs(w[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const long double cand = std::abs(w[i * n + k]);
            if (cand > best) {
                best = cand;
                piv = i;
            }
        }
        if (best == 0.0L) return 0.0L;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(w[k * n + j], w[piv * n + j]);
            det = -det;
        }
        const long double pivot = w[k * n + k];
        det *= pivot;
        for (std::size_t i = k + 1; i < n; ++i) {
            const long double factor = w[i * n + k] / pivot;
            if (factor == 0.0L) continue;
            for (std::size_t j = k + 1; j < n; ++j) w[i * n + j] -= factor * w[k * n + j];
        }
    }
    return det;
}

} // namespace detail

} // namespace mixdisc
