#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mixdisc/matrix.hpp"

namespace mixdisc {

/// Seeded random source. Doubles are derived from raw mt19937_64 output with
/// fixed formulas, so a seed pins the sampled stream exactly.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    std::uint64_t bits() { return gen_(); }

    /// Integer uniform in [lo, hi] inclusive.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        const std::uint64_t span = hi - lo + 1;
        return lo + static_cast<std::uint64_t>(uniform() * static_cast<double>(span)) % span;
    }

    /// Standard normal via Box-Muller, caching the paired draw.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        spare_ = r * std::sin(two_pi * u2);
        have_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

    std::vector<double> gaussian_vector(std::size_t n) {
        std::vector<double> v(n);
        for (double& x : v) x = gaussian();
        return v;
    }

    std::vector<double> unit_vector(std::size_t n) {
        for (;;) {
            std::vector<double> v = gaussian_vector(n);
            const double nrm = norm2(v);
            if (nrm > 1e-8) {
                for (double& x : v) x /= nrm;
                return v;
            }
        }
    }

    /// Random orthogonal matrix: modified Gram-Schmidt (run twice per column)
    /// on a Gaussian matrix, with positive diagonal convention.
    Matrix orthogonal(std::size_t n) {
        Matrix q(n, n);
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> col(n);
            double nrm = 0.0;
            for (;;) {
                for (double& x : col) x = gaussian();
                for (int pass = 0; pass < 2; ++pass) {
                    for (std::size_t k = 0; k < j; ++k) {
                        double proj = 0.0;
                        for (std::size_t i = 0; i < n; ++i) proj += q(i, k) * col[i];
                        for (std::size_t i = 0; i < n; ++i) col[i] -= proj * q(i, k);
                    }
                }
                nrm = norm2(col);
                if (nrm > 1e-8) break;
            }
            for (std::size_t i = 0; i < n; ++i) q(i, j) = col[i] / nrm;
        }
        return q;
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace mixdisc
