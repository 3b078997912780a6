#pragma once

#include <cmath>
#include <span>

namespace mnexact {

/// Neumaier's variant of Kahan summation. Keeps the running error term
/// separately so that adding many small probabilities to a sum near 1 does
/// not lose them.
class CompensatedSum {
public:
    constexpr CompensatedSum() = default;
    explicit constexpr CompensatedSum(double init) : sum_(init) {}

    constexpr void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }

    constexpr CompensatedSum& operator+=(double v) noexcept {
        add(v);
        return *this;
    }

    constexpr CompensatedSum& operator+=(const CompensatedSum& other) noexcept {
        add(other.sum_);
        add(other.comp_);
        return *this;
    }

    constexpr double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) noexcept {
    CompensatedSum s;
    for (double v : values) s.add(v);
    return s.value();
}

/// log Γ(k+1) on integers and reals. std::lgamma is not guaranteed to be
/// reentrant on every platform (signgam), so use the _r form where present.
inline double log_factorial(double k) noexcept {
#if defined(__GLIBC__) || defined(__APPLE__)
    int sign = 0;
    return ::lgamma_r(k + 1.0, &sign);
#else
    return std::lgamma(k + 1.0);
#endif
}

inline double log_gamma(double a) noexcept {
#if defined(__GLIBC__) || defined(__APPLE__)
    int sign = 0;
    return ::lgamma_r(a, &sign);
#else
    return std::lgamma(a);
#endif
}

} // namespace mnexact
