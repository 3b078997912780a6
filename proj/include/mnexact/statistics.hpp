#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "mnexact/core_types.hpp"
#include "mnexact/error.hpp"
#include "mnexact/numeric.hpp"

namespace mnexact {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

/// Sums small term vectors in ascending order. The result depends only on
/// the multiset of terms, so permuted count vectors under a symmetric null
/// produce bitwise-equal statistics.
template <class TermFn>
double sorted_term_sum(std::size_t m, TermFn&& term) {
    constexpr std::size_t kInline = 16;
    if (m <= kInline) {
        std::array<double, kInline> buf;
        for (std::size_t j = 0; j < m; ++j) buf[j] = term(j);
        // insertion sort, m is tiny
        for (std::size_t i = 1; i < m; ++i) {
            const double v = buf[i];
            std::size_t k = i;
            while (k > 0 && buf[k - 1] > v) {
                buf[k] = buf[k - 1];
                --k;
            }
            buf[k] = v;
        }
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += buf[j];
        return s;
    }
    std::vector<double> buf(m);
    for (std::size_t j = 0; j < m; ++j) buf[j] = term(j);
    std::sort(buf.begin(), buf.end());
    double s = 0.0;
    for (double v : buf) s += v;
    return s;
}

inline double safe_log(double p) noexcept { return p > 0.0 ? std::log(p) : -kInf; }

} // namespace detail

/// log f_{n,p}(x) for an arbitrary probability vector p. Cells with x_j = 0
/// contribute nothing; x_j > 0 with p_j = 0 gives -inf.
inline double log_pmf(std::span<const int> x, std::span<const double> p) {
    if (x.size() != p.size())
        throw Error(ErrorCode::DimensionMismatch, "count and probability lengths differ");
    int n = 0;
    for (int v : x) n += v;
    const double body = detail::sorted_term_sum(x.size(), [&](std::size_t j) {
        const int k = x[j];
        if (k == 0) return 0.0;
        if (!(p[j] > 0.0)) return -kInf;
        return k * std::log(p[j]) - log_factorial(k);
    });
    return log_factorial(n) + body;
}

inline double log_pmf(const CountVector& x, const Hypothesis& hyp) {
    if (x.size() != hyp.categories())
        throw Error(ErrorCode::DimensionMismatch, "count and probability lengths differ");
    return log_pmf(x.counts(), hyp.pi.entries());
}

/// log of the continuous pmf extension evaluated at the expectation n*pi.
inline double continuous_log_pmf_at_expectation(const Hypothesis& hyp) {
    if (!hyp.pi.strictly_positive())
        throw Error(ErrorCode::ZeroProbabilityCategory,
                    "continuous pmf at n*pi needs every pi_j > 0");
    CompensatedSum s(log_factorial(hyp.n));
    for (std::size_t j = 0; j < hyp.categories(); ++j) {
        const double e = hyp.expected(j);
        s += e * std::log(hyp.pi[j]) - log_factorial(e);
    }
    return s.value();
}

/// Canonical evaluator of one statistic under one hypothesis.
///
/// Every statistic is a sum over cells of a per-cell term g_j(x_j). Terms
/// are computed by a single function and optionally cached for all counts
/// 0..n, so the tabulated and direct paths return identical doubles. All
/// tie decisions in the exact tests rely on this.
class StatisticEvaluator {
public:
    StatisticEvaluator(StatisticKind kind, const Hypothesis& hyp, bool tabulate = true)
        : kind_(kind), n_(hyp.n), m_(hyp.categories()) {
        if (!kind.is_prob_mass() && kind.lambda() <= -1.0)
            throw Error(ErrorCode::UnsupportedLambda, "lambda <= -1 is not supported");
        pi_.assign(hyp.pi.entries().begin(), hyp.pi.entries().end());
        expected_.resize(m_);
        log_pi_.resize(m_);
        offset_.resize(m_);
        for (std::size_t j = 0; j < m_; ++j) {
            expected_[j] = hyp.expected(j);
            log_pi_[j] = detail::safe_log(pi_[j]);
            offset_[j] = pi_[j] > 0.0 ? log_factorial(expected_[j]) : 0.0;
        }
        if (tabulate) {
            table_.resize(m_ * static_cast<std::size_t>(n_ + 1));
            for (std::size_t j = 0; j < m_; ++j)
                for (int k = 0; k <= n_; ++k) table_[j * (n_ + 1) + k] = raw_term(j, k);
        }
    }

    StatisticKind kind() const noexcept { return kind_; }
    std::size_t categories() const noexcept { return m_; }
    int trials() const noexcept { return n_; }

    double term(std::size_t j, int k) const noexcept {
        if (!table_.empty()) return table_[j * (n_ + 1) + k];
        return raw_term(j, k);
    }

    double operator()(std::span<const int> z) const {
        return detail::sorted_term_sum(m_, [&](std::size_t j) { return term(j, z[j]); });
    }

private:
    double raw_term(std::size_t j, int k) const noexcept {
        const double e = expected_[j];
        if (!(pi_[j] > 0.0)) return k == 0 ? 0.0 : kInf;
        if (kind_.is_prob_mass()) {
            if (static_cast<double>(k) == e) return 0.0;
            // -2 [ (k - e) log pi - (log k! - log Gamma(e+1)) ]
            return 2.0 * ((log_factorial(k) - offset_[j]) - (k - e) * log_pi_[j]);
        }
        const double lambda = kind_.lambda();
        if (lambda == 1.0) {
            const double d = k - e;
            return d * d / e;
        }
        if (k == 0) return 0.0;
        const double log_ratio = std::log(k / e);
        if (lambda == 0.0) return 2.0 * k * log_ratio;
        return 2.0 / (lambda * (lambda + 1.0)) * k * std::expm1(lambda * log_ratio);
    }

    StatisticKind kind_;
    int n_;
    std::size_t m_;
    std::vector<double> pi_, expected_, log_pi_, offset_;
    std::vector<double> table_;
};

/// Tabulated log f_{n,pi}(z), consistent with log_pmf.
class LogPmfEvaluator {
public:
    explicit LogPmfEvaluator(std::span<const double> p, int n, bool tabulate = true)
        : n_(n), m_(p.size()), log_n_fact_(log_factorial(n)) {
        p_.assign(p.begin(), p.end());
        if (tabulate) {
            table_.resize(m_ * static_cast<std::size_t>(n_ + 1));
            for (std::size_t j = 0; j < m_; ++j)
                for (int k = 0; k <= n_; ++k) table_[j * (n_ + 1) + k] = raw_term(j, k);
        }
    }
    explicit LogPmfEvaluator(const Hypothesis& hyp, bool tabulate = true)
        : LogPmfEvaluator(hyp.pi.entries(), hyp.n, tabulate) {}

    double term(std::size_t j, int k) const noexcept {
        if (!table_.empty()) return table_[j * (n_ + 1) + k];
        return raw_term(j, k);
    }

    double operator()(std::span<const int> z) const {
        return log_n_fact_ +
               detail::sorted_term_sum(m_, [&](std::size_t j) { return term(j, z[j]); });
    }

    double pmf(std::span<const int> z) const { return std::exp((*this)(z)); }

private:
    double raw_term(std::size_t j, int k) const noexcept {
        if (k == 0) return 0.0;
        if (!(p_[j] > 0.0)) return -kInf;
        return k * std::log(p_[j]) - log_factorial(k);
    }

    int n_;
    std::size_t m_;
    double log_n_fact_;
    std::vector<double> p_;
    std::vector<double> table_;
};

inline double evaluate(StatisticKind stat, std::span<const int> x, const Hypothesis& hyp) {
    if (x.size() != hyp.categories())
        throw Error(ErrorCode::DimensionMismatch, "count and probability lengths differ");
    return StatisticEvaluator(stat, hyp, /*tabulate=*/false)(x);
}

inline double evaluate(StatisticKind stat, const CountVector& x, const Hypothesis& hyp) {
    return evaluate(stat, x.counts(), hyp);
}

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct GapBound {
    double lower = 0.0;
    double upper = 0.0;
};

/// Bounds for (prob-mass statistic) - (likelihood ratio statistic)
/// - sum_{x_j>0} log(x_j / (n pi_j)), from the Stirling remainder
/// 0 < r(x) < 1/(12x). A zero count contributes
/// -log(2 pi n pi_j) - 2 r(n pi_j) to the difference: the Stirling term
/// 1/2 log(2 pi x_j) has no counterpart to cancel against.
inline GapBound gap_bound(const CountVector& x, const Hypothesis& hyp) {
    if (!hyp.pi.strictly_positive())
        throw Error(ErrorCode::ZeroProbabilityCategory, "gap bound needs every pi_j > 0");
    if (x.size() != hyp.categories())
        throw Error(ErrorCode::DimensionMismatch, "count and probability lengths differ");
    CompensatedSum lower, upper;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double e = hyp.expected(j);
        lower += -2.0 / (12.0 * e);
        if (x[j] > 0) {
            upper += 2.0 / (12.0 * x[j]);
        } else {
            lower += -std::log(kTwoPi * e);
            upper += -std::log(kTwoPi * e);
        }
    }
    return {lower.value(), upper.value()};
}

/// The quantity bounded by gap_bound, computed from the two statistics.
inline double stirling_gap(const CountVector& x, const Hypothesis& hyp) {
    const double tp = evaluate(StatisticKind::prob_mass(), x, hyp);
    const double tg = evaluate(StatisticKind::llr(), x, hyp);
    CompensatedSum s(tp - tg);
    for (std::size_t j = 0; j < x.size(); ++j)
        if (x[j] > 0) s += -std::log(x[j] / hyp.expected(j));
    return s.value();
}

/// Continuous extensions of the statistics on the real simplex (u_j > 0).
inline double continuous_statistic(StatisticKind stat, std::span<const double> u,
                                   const Hypothesis& hyp) {
    CompensatedSum s;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double e = hyp.expected(j);
        if (stat.is_prob_mass()) {
            s += 2.0 * ((log_factorial(u[j]) - log_factorial(e)) - (u[j] - e) * std::log(hyp.pi[j]));
        } else if (stat.lambda() == 0.0) {
            s += 2.0 * u[j] * std::log(u[j] / e);
        } else {
            const double l = stat.lambda();
            s += 2.0 / (l * (l + 1.0)) * u[j] * std::expm1(l * std::log(u[j] / e));
        }
    }
    return s.value();
}

} // namespace mnexact
