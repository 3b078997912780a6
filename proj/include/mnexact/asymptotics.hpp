#pragma once

#include <cmath>
#include <limits>

#include "mnexact/core_types.hpp"
#include "mnexact/error.hpp"
#include "mnexact/numeric.hpp"
#include "mnexact/statistics.hpp"

namespace mnexact {

namespace detail {

inline constexpr double kGammaEps = 1e-16;
inline constexpr int kGammaMaxIter = 100000;

// P(a, x) by its power series; converges quickly for x < a + 1.
inline double lower_gamma_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int k = 1; k < kGammaMaxIter; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kGammaEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Q(a, x) by the Legendre continued fraction, modified Lentz evaluation.
inline double upper_gamma_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kGammaMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kGammaEps) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

} // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double regularized_gamma_p(double a, double x) {
    if (!(x > 0.0)) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return detail::lower_gamma_series(a, x);
    return 1.0 - detail::upper_gamma_fraction(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double regularized_gamma_q(double a, double x) {
    if (!(x > 0.0)) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - detail::lower_gamma_series(a, x);
    return detail::upper_gamma_fraction(a, x);
}

/// Survival function of the chi-square distribution. Negative t is
/// treated as 0.
inline double chisq_sf(double t, int df) {
    if (df < 1) throw Error(ErrorCode::InvalidConfig, "degrees of freedom must be >= 1");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (t <= 0.0) return 1.0;
    return regularized_gamma_q(0.5 * df, 0.5 * t);
}

inline double chisq_cdf(double t, int df) {
    if (df < 1) throw Error(ErrorCode::InvalidConfig, "degrees of freedom must be >= 1");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (t <= 0.0) return 0.0;
    return regularized_gamma_p(0.5 * df, 0.5 * t);
}

struct ChiSquareTail {
    int df = 1;
    double t = 0.0;
    double sf = 1.0;
};

inline ChiSquareTail chisq_tail(double t, int df) { return {df, t, chisq_sf(t, df)}; }

/// Chi-square tail of an already computed statistic value. Cancellation
/// noise down to -1e-12 is clamped to zero; +inf maps to 0.
inline double asymptotic_p_from_value(double statistic, int df) {
    if (std::isinf(statistic) && statistic > 0) return 0.0;
    if (statistic < 0.0 && statistic >= -1e-12) statistic = 0.0;
    return chisq_sf(statistic, df);
}

inline double asymptotic_p(StatisticKind stat, const CountVector& x, const Hypothesis& hyp) {
    if (!hyp.pi.strictly_positive())
        throw Error(ErrorCode::ZeroProbabilityCategory, "asymptotic p-value needs every pi_j > 0");
    return asymptotic_p_from_value(evaluate(stat, x, hyp),
                                   static_cast<int>(hyp.categories()) - 1);
}

} // namespace mnexact
