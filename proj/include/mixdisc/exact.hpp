#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include "mixdisc/errors.hpp"
#include "mixdisc/matrix.hpp"
#include "mixdisc/linalg.hpp"
#include "mixdisc/tuple.hpp"

namespace mixdisc {

/// Exact value in both linear and log/sign form.
struct ExactValue {
    double value = 0.0;
    double log_abs = 0.0; // -inf when sign == 0
    int sign = 0;
    bool overflow_warning = false; // some intermediate |det| exceeded 1e280
};

namespace detail {

struct KahanLd {
    long double sum = 0.0L;
    long double comp = 0.0L;
    void add(long double x) {
        const long double y = x - comp;
        const long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

/// Subset masks of {0..n-1} ordered by increasing popcount, numerically
/// (= lexicographically on the element lists) within each class. The empty
/// set is omitted: it contributes a zero determinant.
inline std::vector<std::uint32_t> subset_masks(std::size_t n) {
    std::vector<std::uint32_t> masks;
    masks.reserve((std::size_t{1} << n) - 1);
    const std::uint32_t limit = std::uint32_t{1} << n;
    for (std::size_t k = 1; k <= n; ++k) {
        std::uint32_t mask = (std::uint32_t{1} << k) - 1;
        while (mask < limit) {
            masks.push_back(mask);
            // Gosper's hack: next mask with the same popcount.
            const std::uint32_t c = mask & (0u - mask);
            const std::uint32_t r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    return masks;
}

struct ChunkSum {
    long double sum = 0.0L;
    bool overflow = false;
};

inline ChunkSum mixed_discriminant_chunk(const MatrixTuple& t,
                                         const std::vector<std::uint32_t>& masks,
                                         std::size_t begin, std::size_t end) {
    const std::size_t n = t.size();
    ChunkSum out;
    KahanLd acc;
    std::vector<long double> w(n * n);
    for (std::size_t idx = begin; idx < end; ++idx) {
        const std::uint32_t mask = masks[idx];
        std::fill(w.begin(), w.end(), 0.0L);
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask & (std::uint32_t{1} << i))) continue;
            const std::vector<double>& q = t[i].dense().data();
            for (std::size_t k = 0; k < n * n; ++k) w[k] += q[k];
        }
        const long double det = lu_determinant_ld(w, n);
        if (std::abs(det) > 1e280L) out.overflow = true;
        const bool negate = ((n - std::popcount(mask)) & 1u) != 0;
        acc.add(negate ? -det : det);
    }
    out.sum = acc.sum;
    return out;
}

} // namespace detail

/// Exact mixed discriminant by subset inclusion-exclusion over determinants:
/// sum over S of (-1)^(n-|S|) det(sum of Q_i for i in S). This extracts the
/// coefficient of t_1...t_n of det(t_1 Q_1 + ... + t_n Q_n).
///
/// The subset sequence is split into `chunks` contiguous ranges, each summed
/// with compensated accumulation, and chunk results are combined in index
/// order, so the value is bit-stable for a given chunk count regardless of
/// how many threads run.
inline ExactValue mixed_discriminant(const MatrixTuple& t, unsigned chunks = 1,
                                     unsigned threads = 1) {
    constexpr std::size_t cap = 20;
    const std::size_t n = t.size();
    if (n > cap) throw DimensionTooLarge(n, cap);
    if (chunks == 0) chunks = 1;
    if (threads == 0) threads = 1;

    const std::vector<std::uint32_t> masks = detail::subset_masks(n);
    const std::size_t total = masks.size();
    chunks = static_cast<unsigned>(std::min<std::size_t>(chunks, total));

    std::vector<detail::ChunkSum> partial(chunks);
    auto run_chunk = [&](unsigned c) {
        const std::size_t begin = total * c / chunks;
        const std::size_t end = total * (c + 1) / chunks;
        partial[c] = detail::mixed_discriminant_chunk(t, masks, begin, end);
    };

    if (threads <= 1 || chunks == 1) {
        for (unsigned c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::thread> pool;
        std::atomic<unsigned> next{0};
        const unsigned workers = std::min(threads, chunks);
        pool.reserve(workers);
        for (unsigned wi = 0; wi < workers; ++wi)
            pool.emplace_back([&] {
                for (;;) {
                    const unsigned c = next.fetch_add(1);
                    if (c >= chunks) return;
                    run_chunk(c);
                }
            });
        for (std::thread& th : pool) th.join();
    }

    detail::KahanLd acc;
    bool overflow = false;
    for (const detail::ChunkSum& p : partial) {
        acc.add(p.sum);
        overflow = overflow || p.overflow;
    }

    ExactValue out;
    out.value = static_cast<double>(acc.sum);
    out.sign = (out.value > 0.0) - (out.value < 0.0);
    out.log_abs = out.sign == 0 ? -std::numeric_limits<double>::infinity()
                                : static_cast<double>(std::log(std::abs(acc.sum)));
    out.overflow_warning = overflow;
    return out;
}

/// Ryser's inclusion-exclusion permanent with Gray-code row-sum updates.
inline double permanent_ryser(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error("permanent requires a square matrix");
    constexpr std::size_t cap = 28;
    const std::size_t n = a.rows();
    if (n > cap) throw DimensionTooLarge(n, cap);
    if (n == 0) return 1.0;

    std::vector<long double> rowsum(n, 0.0L);
    detail::KahanLd acc;
    std::uint64_t prev = 0;
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < count; ++k) {
        const std::uint64_t gray = k ^ (k >> 1);
        const std::uint64_t flipped = gray ^ prev;
        const unsigned j = static_cast<unsigned>(std::countr_zero(flipped));
        if (gray & flipped) {
            for (std::size_t i = 0; i < n; ++i) rowsum[i] += a(i, j);
        } else {
            for (std::size_t i = 0; i < n; ++i) rowsum[i] -= a(i, j);
        }
        long double prod = 1.0L;
        for (std::size_t i = 0; i < n; ++i) prod *= rowsum[i];
        const bool negate = ((n - std::popcount(gray)) & 1u) != 0;
        acc.add(negate ? -prod : prod);
        prev = gray;
    }
    return static_cast<double>(acc.sum);
}

/// Direct permutation-sum permanent; the desk-scale oracle for Ryser.
inline double permanent_naive(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error("permanent requires a square matrix");
    constexpr std::size_t cap = 10;
    const std::size_t n = a.rows();
    if (n > cap) throw DimensionTooLarge(n, cap);
    if (n == 0) return 1.0;

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    detail::KahanLd acc;
    do {
        long double prod = 1.0L;
        for (std::size_t i = 0; i < n; ++i) prod *= a(i, perm[i]);
        acc.add(prod);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(acc.sum);
}

} // namespace mixdisc
