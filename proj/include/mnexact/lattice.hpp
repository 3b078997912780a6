#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mnexact/core_types.hpp"
#include "mnexact/error.hpp"
#include "mnexact/numeric.hpp"

namespace mnexact {

/// Half the L1 distance. Integer for points with equal totals.
inline int distance(std::span<const int> x, std::span<const int> y) {
    if (x.size() != y.size())
        throw Error(ErrorCode::DimensionMismatch, "points have different dimensions");
    long long s = 0, tx = 0, ty = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        s += std::abs(x[j] - y[j]);
        tx += x[j];
        ty += y[j];
    }
    if (tx != ty) throw Error(ErrorCode::DimensionMismatch, "points have different totals");
    return static_cast<int>(s / 2);
}

inline int distance(const CountVector& x, const CountVector& y) {
    return distance(x.counts(), y.counts());
}

/// Half the L1 distance from a lattice point to a real point.
inline double real_distance(std::span<const int> z, std::span<const double> c) {
    double s = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) s += std::abs(z[j] - c[j]);
    return 0.5 * s;
}

/// Largest-remainder rounding of n*pi: floor every coordinate, then hand out
/// the missing units in decreasing order of fractional part (lowest index
/// first on ties).
inline CountVector nearest_lattice_point(const Hypothesis& hyp) {
    const std::size_t m = hyp.categories();
    std::vector<int> z(m);
    std::vector<double> frac(m);
    long long assigned = 0;
    for (std::size_t j = 0; j < m; ++j) {
        const double e = hyp.expected(j);
        const double f = std::floor(e);
        z[j] = static_cast<int>(f);
        frac[j] = e - f;
        assigned += z[j];
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    long long missing = hyp.n - assigned;
    for (std::size_t i = 0; missing > 0; i = (i + 1) % m, --missing) ++z[order[i]];
    return CountVector::from_trusted(z);
}

/// Caller-pulled enumeration of the whole discrete simplex in
/// lexicographic order.
class SimplexCursor {
public:
    SimplexCursor(int n, std::size_t m) : n_(n), z_(m, 0) {
        if (m < 2) throw Error(ErrorCode::TooFewCategories, "need at least 2 categories");
        if (n < 0) throw Error(ErrorCode::NonpositiveN, "n must be nonnegative");
        z_.back() = n;
    }

    /// Advances to the next point; the first call yields (0,...,0,n).
    bool next() {
        if (!started_) {
            started_ = true;
            return true;
        }
        const std::size_t m = z_.size();
        std::size_t k;
        if (z_[m - 1] > 0) {
            k = m - 2;
        } else {
            std::size_t last_nz = m - 1;
            while (last_nz > 0 && z_[last_nz] == 0) --last_nz;
            if (last_nz == 0) return false;
            k = last_nz - 1;
        }
        ++z_[k];
        int prefix = 0;
        for (std::size_t i = 0; i <= k; ++i) prefix += z_[i];
        for (std::size_t i = k + 1; i + 1 < m; ++i) z_[i] = 0;
        z_[m - 1] = n_ - prefix;
        return true;
    }

    std::span<const int> point() const noexcept { return z_; }

private:
    int n_;
    std::vector<int> z_;
    bool started_ = false;
};

inline std::uint64_t simplex_size(int n, std::size_t m) {
    // C(n+m-1, m-1), exact while it fits
    std::uint64_t c = 1;
    for (std::size_t i = 1; i < m; ++i) c = c * (n + i) / i;
    return c;
}

/// Calls f(span<const int>) for every point of the discrete simplex.
template <class F>
void enumerate_full(int n, std::size_t m, F&& f) {
    SimplexCursor cur(n, m);
    while (cur.next()) f(cur.point());
}

/// Caller-pulled enumeration of the lattice points at distance exactly r
/// from a center, optionally restricted by per-coordinate upper caps.
///
/// A point is center + delta with positive parts summing to r and negative
/// parts summing to -r. Coordinates are assigned left to right; the last one
/// is forced. Partial assignments are pruned when the remaining coordinates
/// cannot absorb the outstanding surplus or deficit.
class ShellCursor {
public:
    ShellCursor(std::span<const int> center, int radius, std::span<const int> caps = {},
                std::optional<std::pair<int, int>> first_delta = std::nullopt)
        : m_(center.size()), radius_(radius), center_(center.begin(), center.end()),
          up_(m_), down_(m_), suffix_up_(m_ + 1, 0), suffix_down_(m_ + 1, 0), delta_(m_, 0),
          rem_surplus_(m_ + 1, 0), rem_deficit_(m_ + 1, 0), z_(center_), first_delta_(first_delta) {
        if (m_ < 2) throw Error(ErrorCode::TooFewCategories, "need at least 2 categories");
        int n = 0;
        for (int c : center_) n += c;
        for (std::size_t j = 0; j < m_; ++j) {
            int cap = n;
            if (!caps.empty()) cap = std::max(std::min(caps[j], n), center_[j]);
            up_[j] = cap - center_[j];
            down_[j] = center_[j];
        }
        for (std::size_t j = m_; j-- > 0;) {
            suffix_up_[j] = suffix_up_[j + 1] + up_[j];
            suffix_down_[j] = suffix_down_[j + 1] + down_[j];
        }
        if (radius_ < 0) done_ = true;
    }

    int radius() const noexcept { return radius_; }

    bool next() {
        if (done_) return false;
        std::ptrdiff_t k;
        if (!started_) {
            started_ = true;
            rem_surplus_[0] = radius_;
            rem_deficit_[0] = radius_;
            k = 0;
            delta_[0] = low(0) - 1;
        } else {
            k = static_cast<std::ptrdiff_t>(m_) - 2;
        }
        const auto last = static_cast<std::ptrdiff_t>(m_) - 2;
        while (k >= 0) {
            const auto ku = static_cast<std::size_t>(k);
            if (++delta_[ku] > high(ku)) {
                --k;
                continue;
            }
            const int d = delta_[ku];
            const int s = rem_surplus_[ku] - std::max(d, 0);
            const int t = rem_deficit_[ku] - std::max(-d, 0);
            if (s > suffix_up_[ku + 1] || t > suffix_down_[ku + 1]) continue;
            rem_surplus_[ku + 1] = s;
            rem_deficit_[ku + 1] = t;
            if (k == last) {
                if (s > 0 && t > 0) continue;
                delta_[m_ - 1] = s - t;
                for (std::size_t j = 0; j < m_; ++j) z_[j] = center_[j] + delta_[j];
                return true;
            }
            ++k;
            delta_[static_cast<std::size_t>(k)] = low(static_cast<std::size_t>(k)) - 1;
        }
        done_ = true;
        return false;
    }

    std::span<const int> point() const noexcept { return z_; }

private:
    int low(std::size_t k) const noexcept {
        int lo = -std::min(rem_deficit_[k], down_[k]);
        if (k == 0 && first_delta_) lo = std::max(lo, first_delta_->first);
        return lo;
    }
    int high(std::size_t k) const noexcept {
        int hi = std::min(rem_surplus_[k], up_[k]);
        if (k == 0 && first_delta_) hi = std::min(hi, first_delta_->second);
        return hi;
    }

    std::size_t m_;
    int radius_;
    std::vector<int> center_, up_, down_, suffix_up_, suffix_down_, delta_;
    std::vector<int> rem_surplus_, rem_deficit_, z_;
    std::optional<std::pair<int, int>> first_delta_;
    bool started_ = false;
    bool done_ = false;
};

/// Calls f(span<const int>) for each point of the shell of radius r.
template <class F>
void enumerate_shell(std::span<const int> center, int r, F&& f, std::span<const int> caps = {}) {
    ShellCursor cur(center, r, caps);
    while (cur.next()) f(cur.point());
}

/// Splits delta_1 (the change of the first coordinate) into `parts`
/// disjoint ranges covering [-r, r]. Shell cursors restricted to these
/// ranges partition the shell.
inline std::vector<std::pair<int, int>> shell_partitions(int r, int parts) {
    std::vector<std::pair<int, int>> out;
    parts = std::max(1, std::min(parts, 2 * r + 1));
    const int width = 2 * r + 1;
    int lo = -r;
    for (int p = 0; p < parts; ++p) {
        const int size = width / parts + (p < width % parts ? 1 : 0);
        out.emplace_back(lo, lo + size - 1);
        lo += size;
    }
    return out;
}

namespace detail {

inline double log_binomial_term(int j, int n, double log_p, double log_q) {
    return log_factorial(n) - log_factorial(j) - log_factorial(n - j) + j * log_p + (n - j) * log_q;
}

} // namespace detail

/// P(Bin(n, p) >= k), summed term by term in log space.
inline double binomial_tail(int k, int n, double p) {
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    if (!(p > 0.0)) return 0.0;
    if (p >= 1.0) return 1.0;
    const double log_p = std::log(p), log_q = std::log1p(-p);
    CompensatedSum s;
    for (int j = k; j <= n; ++j) s += std::exp(detail::log_binomial_term(j, n, log_p, log_q));
    return std::min(1.0, s.value());
}

/// Largest c with P(Bin(n, p) >= c) >= cutoff (0 if none).
inline int binomial_tail_cap(int n, double p, double cutoff) {
    if (!(p > 0.0)) return 0;
    if (p >= 1.0) return n;
    const double log_p = std::log(p), log_q = std::log1p(-p);
    CompensatedSum tail;
    for (int j = n; j > 0; --j) {
        tail += std::exp(detail::log_binomial_term(j, n, log_p, log_q));
        if (tail.value() >= cutoff) return j;
    }
    return 0;
}

} // namespace mnexact
