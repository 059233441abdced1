#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "mixdisc/errors.hpp"
#include "mixdisc/matrix.hpp"
#include "mixdisc/scaling.hpp"
#include "mixdisc/tuple.hpp"

namespace mixdisc {

/// Certified bracket for ln D(Q_1,...,Q_n): bounds on the scaled doubly
/// stochastic tuple shifted back through the scaling correction
/// log_correction = -2 ln|det T| - sum ln tau_i.
struct DiscriminantEstimate {
    double log_lower = 0.0;
    double log_upper = 0.0;
    double log_correction = 0.0;
    double alpha_input = 0.0;
    double alpha_scaled = 0.0;
    std::size_t n = 0;
};

/// ln(n!/n^n), the sharp lower bound for the mixed discriminant of a doubly
/// stochastic tuple, attained only at the uniform tuple (I/n,...,I/n).
inline double bapat_lower(std::size_t n) {
    if (n < 1) throw Error("bapat_lower requires n >= 1");
    const double nn = static_cast<double>(n);
    return std::lgamma(nn + 1.0) - nn * std::log(nn);
}

/// ln of the concentration upper bound n^(alpha^4) e^-(n-1) for an
/// alpha-conditioned doubly stochastic tuple, capped at 0 because every
/// doubly stochastic tuple has mixed discriminant at most 1.
inline double conditioned_upper(std::size_t n, double alpha) {
    if (n < 1) throw Error("conditioned_upper requires n >= 1");
    if (alpha < 1.0) throw Error("conditioned_upper requires alpha >= 1");
    const double nn = static_cast<double>(n);
    const double raw = std::pow(alpha, 4) * std::log(nn) - (nn - 1.0);
    return std::min(0.0, raw);
}

/// Scales the tuple and brackets ln D between the corrected lower and upper
/// bounds. The upper exponent uses whichever measured conditioning (input or
/// scaled tuple) gives the tighter valid bound; both alphas are reported.
inline DiscriminantEstimate estimate(const MatrixTuple& t, const SolverConfig& cfg = {}) {
    const ConditionReport cond_in = alpha_of(t);
    if (!cond_in.positive_definite)
        throw NotPositiveDefinite("estimate requires a positive definite tuple");

    const ScalingResult res = scale_to_doubly_stochastic(t, cfg);
    double log_tau = 0.0;
    for (double tau : res.tau) log_tau += std::log(tau);
    const double correction = -2.0 * res.log_det_T - log_tau;

    const ConditionReport cond_out = alpha_of(res.scaled);
    const double alpha_eff = cond_out.positive_definite
                                 ? std::min(cond_in.alpha, cond_out.alpha)
                                 : cond_in.alpha;

    DiscriminantEstimate e;
    e.n = t.size();
    e.log_correction = correction;
    e.alpha_input = cond_in.alpha;
    e.alpha_scaled = cond_out.alpha;
    e.log_lower = correction + bapat_lower(e.n);
    e.log_upper = correction + conditioned_upper(e.n, alpha_eff);
    return e;
}

/// ln of prod_i (r_i!)^(1/r_i) / r_i, the permanent upper bound for a
/// stochastic matrix whose row i entries do not exceed 1/r_i.
inline double bregman_minc_upper(const Matrix& b, const std::vector<int>& r) {
    if (b.rows() != b.cols()) throw Error("bregman_minc_upper requires a square matrix");
    const std::size_t n = b.rows();
    if (r.size() != n) throw Error("bregman_minc_upper requires one r per row");

    for (std::size_t i = 0; i < n; ++i) {
        if (r[i] < 1)
            throw HypothesisViolated("row cap r must be a positive integer", i);
        double row_sum = 0.0;
        const double cap = 1.0 / static_cast<double>(r[i]);
        for (std::size_t j = 0; j < n; ++j) {
            const double v = b(i, j);
            row_sum += v;
            if (v < -1e-12 || v > cap + 1e-12)
                throw HypothesisViolated("entry outside [0, 1/r]", i);
        }
        if (std::abs(row_sum - 1.0) > 1e-10)
            throw HypothesisViolated("row sum is not 1", i);
    }

    double bound = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ri = static_cast<double>(r[i]);
        bound += std::lgamma(ri + 1.0) / ri - std::log(ri);
    }
    return bound;
}

/// Two-sided log-scale bracket for the permanent of a doubly stochastic
/// matrix with entries at most alpha/n: the n!/n^n lower bound paired with
/// the row-cap bound at r = floor(n/alpha), the largest admissible cap.
inline std::pair<double, double> permanent_sandwich(const Matrix& b, double alpha) {
    if (b.rows() != b.cols()) throw Error("permanent_sandwich requires a square matrix");
    const std::size_t n = b.rows();
    if (n < 1) throw Error("permanent_sandwich requires n >= 1");
    if (alpha < 1.0) throw Error("permanent_sandwich requires alpha >= 1");

    const double entry_cap = alpha / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        double row_sum = 0.0;
        double col_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row_sum += b(i, j);
            col_sum += b(j, i);
            if (b(i, j) < -1e-10 || b(i, j) > entry_cap + 1e-12)
                throw HypothesisViolated("entry outside [0, alpha/n]", i);
        }
        if (std::abs(row_sum - 1.0) > 1e-10 || std::abs(col_sum - 1.0) > 1e-10)
            throw HypothesisViolated("matrix is not doubly stochastic", i);
    }

    const int cap = std::max(1, static_cast<int>(std::floor(static_cast<double>(n) / alpha)));
    const std::vector<int> r(n, cap);
    return {bapat_lower(n), bregman_minc_upper(b, r)};
}

} // namespace mixdisc
