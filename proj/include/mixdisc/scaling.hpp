#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "mixdisc/errors.hpp"
#include "mixdisc/exact.hpp"
#include "mixdisc/linalg.hpp"
#include "mixdisc/matrix.hpp"
#include "mixdisc/tuple.hpp"

namespace mixdisc {

struct SolverConfig {
    double trace_tol = 1e-10;
    int max_iterations = 500;
    double line_search_shrink = 0.5;
    double armijo_constant = 1e-4;
};

/// Output of scaling a positive definite tuple to doubly stochastic form:
/// minimizer xi on the sum-zero hyperplane, weights tau_i = exp(xi_i),
/// transform T with T^T (sum e^{xi_i} Q_i) T = I, and B_i = tau_i T^T Q_i T.
struct ScalingResult {
    std::vector<double> xi;
    std::vector<double> tau;
    Matrix transform;       // T, upper triangular
    double log_det_T = 0.0;
    MatrixTuple scaled;     // the B_i
    double residual = 0.0;  // max_i |tr B_i - 1|
    int iterations = 0;
};

/// ln det(sum_i e^{x_i} Q_i).
inline double objective_f(const MatrixTuple& t, const std::vector<double>& x) {
    if (x.size() != t.size()) throw Error("objective_f dimension mismatch");
    SymMatrix m(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) m.add_scaled(t[i], std::exp(x[i]));
    return log_det(m);
}

namespace detail {

struct SolverState {
    Matrix transform;         // T = (L^T)^{-1} where sum e^{x_i} Q_i = L L^T
    Matrix minv;              // T T^T
    double log_det_T;         // note f(x) = -2 log_det_T
    std::vector<double> grad; // grad_i = e^{x_i} tr(M^{-1} Q_i) = tr B_i
};

inline SolverState evaluate_state(const MatrixTuple& t, const std::vector<double>& x) {
    const std::size_t n = t.size();
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.add_scaled(t[i], std::exp(x[i]));

    const CholeskyFactor f = cholesky(m);
    Matrix transform = solve_upper(f.lower.transposed(), Matrix::identity(n));
    double ldt = 0.0;
    for (std::size_t i = 0; i < n; ++i) ldt -= std::log(f.lower(i, i));

    Matrix minv = transform * transform.transposed();
    std::vector<double> grad(n);
    for (std::size_t i = 0; i < n; ++i) {
        double tr = 0.0;
        const std::vector<double>& q = t[i].dense().data();
        const std::vector<double>& w = minv.data();
        for (std::size_t k = 0; k < n * n; ++k) tr += q[k] * w[k];
        grad[i] = std::exp(x[i]) * tr;
    }
    return SolverState{std::move(transform), std::move(minv), ldt, std::move(grad)};
}

} // namespace detail

/// Gradient of objective_f: component i is e^{x_i} tr(M^{-1} Q_i) with
/// M = sum e^{x_j} Q_j. Components are positive and sum to n.
inline std::vector<double> gradient_f(const MatrixTuple& t, const std::vector<double>& x) {
    if (x.size() != t.size()) throw Error("gradient_f dimension mismatch");
    return detail::evaluate_state(t, x).grad;
}

/// Scales a positive definite tuple to doubly stochastic form by minimizing
/// f(x) = ln det(sum e^{x_i} Q_i) over the hyperplane {sum x_i = 0}.
///
/// Projected Newton with Armijo backtracking, falling back to projected
/// gradient descent when the reduced Hessian fails to factor. Convergence is
/// declared on the externally meaningful quantity max_i |tr B_i - 1| at the
/// current iterate.
inline ScalingResult scale_to_doubly_stochastic(const MatrixTuple& t,
                                                const SolverConfig& cfg = {}) {
    const std::size_t n = t.size();
    {
        const ConditionReport cond = alpha_of(t);
        if (!cond.positive_definite)
            throw NotPositiveDefinite("scaling requires a positive definite tuple");
    }

    // Start from trace-equalizing weights projected onto the hyperplane.
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = -std::log(t[i].trace());
    auto project = [&x, n] {
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(n);
        for (double& v : x) v -= mean;
    };
    project();

    const Matrix basis =
        n >= 2 ? hyperplane_basis(std::vector<double>(n, 1.0 / std::sqrt(double(n))))
               : Matrix(1, 0);
    const std::size_t nr = basis.cols();

    auto residual_of = [](const std::vector<double>& grad) {
        double r = 0.0;
        for (double g : grad) r = std::max(r, std::abs(g - 1.0));
        return r;
    };

    detail::SolverState state = detail::evaluate_state(t, x);
    double residual = residual_of(state.grad);
    int iterations = 0;

    auto take_step = [&] {
        if (iterations >= cfg.max_iterations || nr == 0)
            throw NoConvergence(x, residual, iterations);
        const double f_curr = -2.0 * state.log_det_T;

        // Hessian H_ij = delta_ij g_i - tr(Y_i Y_j), Y_i = e^{x_i} M^{-1} Q_i.
        std::vector<Matrix> y;
        y.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            y.push_back((state.minv * t[i].dense()) * std::exp(x[i]));
        Matrix hess(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                double tr = 0.0;
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b) tr += y[i](a, b) * y[j](b, a);
                const double h = (i == j ? state.grad[i] : 0.0) - tr;
                hess(i, j) = h;
                hess(j, i) = h;
            }
        }

        std::vector<double> grad_r(nr, 0.0);
        for (std::size_t j = 0; j < nr; ++j)
            for (std::size_t i = 0; i < n; ++i) grad_r[j] += basis(i, j) * state.grad[i];

        const SymMatrix hess_r = congruence(SymMatrix::from_dense(hess), basis);
        std::vector<double> dir_r;
        bool newton = true;
        try {
            dir_r = solve_spd(hess_r, grad_r);
            for (double& v : dir_r) v = -v;
        } catch (const NotPositiveDefinite&) {
            newton = false;
        }
        double slope = 0.0;
        if (newton) {
            slope = dot(grad_r, dir_r);
            if (!(slope < 0.0)) newton = false;
        }
        if (!newton) {
            dir_r = grad_r;
            for (double& v : dir_r) v = -v;
            slope = -dot(grad_r, grad_r);
        }
        if (slope == 0.0) throw NoConvergence(x, residual, iterations);

        std::vector<double> step(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < nr; ++j) step[i] += basis(i, j) * dir_r[j];

        // Near the minimum the predicted decrease sinks below the rounding
        // noise of evaluating f; the allowance keeps full Newton steps
        // acceptable there instead of starving the line search.
        const double noise = 1e-14 * (1.0 + std::abs(f_curr));
        double s = 1.0;
        std::vector<double> x_next(n);
        bool accepted = false;
        for (int backtrack = 0; backtrack < 80; ++backtrack) {
            for (std::size_t i = 0; i < n; ++i) x_next[i] = x[i] + s * step[i];
            if (objective_f(t, x_next) <=
                f_curr + cfg.armijo_constant * s * slope + noise) {
                accepted = true;
                break;
            }
            s *= cfg.line_search_shrink;
        }
        if (!accepted) throw NoConvergence(x, residual, iterations);

        x = x_next;
        project();
        state = detail::evaluate_state(t, x);
        residual = residual_of(state.grad);
        ++iterations;
    };

    // The gradient residual and the traces of the explicitly built B differ
    // only in rounding; tighten and re-enter if the built value lands over.
    double gate = cfg.trace_tol;
    for (;;) {
        while (residual > gate) take_step();

        std::vector<double> tau(n);
        for (std::size_t i = 0; i < n; ++i) tau[i] = std::exp(x[i]);
        std::vector<SymMatrix> scaled;
        scaled.reserve(n);
        double built_residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            SymMatrix b = congruence(t[i], state.transform);
            b *= tau[i];
            built_residual = std::max(built_residual, std::abs(b.trace() - 1.0));
            scaled.push_back(std::move(b));
        }
        if (built_residual <= cfg.trace_tol)
            return ScalingResult{std::move(x),
                                 std::move(tau),
                                 std::move(state.transform),
                                 state.log_det_T,
                                 MatrixTuple(std::move(scaled)),
                                 built_residual,
                                 iterations};
        gate *= 0.25;
        if (gate < 1e-15) throw NoConvergence(x, built_residual, iterations);
    }
}

/// Scaling does not decrease the mixed discriminant when the input traces
/// sum to n. Returns (before, after) and throws PropertyViolation if the
/// inequality fails beyond relative 1e-8.
inline std::pair<ExactValue, ExactValue> verify_lemma22(const MatrixTuple& t,
                                                        const SolverConfig& cfg = {}) {
    double trace_sum = 0.0;
    for (const SymMatrix& q : t) trace_sum += q.trace();
    if (std::abs(trace_sum - static_cast<double>(t.size())) > 1e-8 * t.size())
        throw Error("verify_lemma22 requires trace sum n (got " +
                    std::to_string(trace_sum) + ")");

    const ExactValue before = mixed_discriminant(t);
    const ScalingResult scaled = scale_to_doubly_stochastic(t, cfg);
    const ExactValue after = mixed_discriminant(scaled.scaled);
    if (after.value < before.value * (1.0 - 1e-8))
        throw PropertyViolation("scaling decreased the mixed discriminant: " +
                                std::to_string(before.value) + " -> " +
                                std::to_string(after.value));
    return {before, after};
}

/// Scaling at most fourth-powers the conditioning. Returns (alpha of the
/// input, alpha of the scaled tuple) and throws PropertyViolation if
/// alpha_out exceeds alpha_in^4 beyond relative 1e-6.
inline std::pair<double, double> verify_lemma24(const MatrixTuple& t,
                                                const SolverConfig& cfg = {}) {
    const ConditionReport cond_in = alpha_of(t);
    if (!cond_in.positive_definite)
        throw NotPositiveDefinite("verify_lemma24 requires a positive definite tuple");
    const ScalingResult scaled = scale_to_doubly_stochastic(t, cfg);
    const ConditionReport cond_out = alpha_of(scaled.scaled);
    const double bound = std::pow(cond_in.alpha, 4) * (1.0 + 1e-6);
    if (!cond_out.positive_definite || cond_out.alpha > bound)
        throw PropertyViolation("scaled tuple conditioning " +
                                std::to_string(cond_out.alpha) + " exceeds alpha^4 bound " +
                                std::to_string(bound));
    return {cond_in.alpha, cond_out.alpha};
}

} // namespace mixdisc
