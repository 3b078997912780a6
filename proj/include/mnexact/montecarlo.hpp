#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "mnexact/core_types.hpp"
#include "mnexact/error.hpp"
#include "mnexact/numeric.hpp"
#include "mnexact/statistics.hpp"

namespace mnexact {

inline constexpr int kDefaultMonteCarloSamples = 10000;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t v) noexcept {
    std::uint64_t s = v;
    return splitmix64(s);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

} // namespace detail

/// xoshiro256** seeded through splitmix64. Children are derived from the
/// original seed and an index only, so a child stream does not depend on
/// how many siblings were created before it or on draws from the parent.
class SeededRng {
public:
    using result_type = std::uint64_t;

    explicit SeededRng(std::uint64_t seed) noexcept : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = detail::splitmix64(sm);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    std::uint64_t seed() const noexcept { return seed_; }

    result_type operator()() noexcept {
        const std::uint64_t result = detail::rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Standard exponential by inversion.
    double exponential() noexcept { return -std::log1p(-uniform()); }

    SeededRng child(std::uint64_t index) const noexcept {
        return SeededRng(detail::mix64(detail::mix64(seed_) ^ detail::mix64(~index)));
    }

private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
};

/// Bin(n, p) draw. Inversion from zero when the mean of the smaller tail
/// side is small, otherwise a count of Bernoulli trials.
inline int sample_binomial(SeededRng& rng, int n, double p) {
    if (n <= 0 || !(p > 0.0)) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - sample_binomial(rng, n, 1.0 - p);
    if (n * p < 30.0) {
        const double q = 1.0 - p;
        const double ratio = p / q;
        double f = std::exp(n * std::log1p(-p));
        double u = rng.uniform();
        int k = 0;
        while (u >= f && k < n) {
            u -= f;
            f *= ratio * (n - k) / (k + 1);
            ++k;
        }
        return k;
    }
    int k = 0;
    for (int i = 0; i < n; ++i) k += rng.uniform() < p ? 1 : 0;
    return k;
}

/// Flat Dirichlet draw: normalized standard exponentials.
inline ProbabilityVector sample_uniform_simplex(SeededRng& rng, std::size_t m) {
    if (m < 2) throw Error(ErrorCode::TooFewCategories, "need at least 2 categories");
    std::vector<double> e(m);
    CompensatedSum total;
    for (auto& v : e) {
        v = rng.exponential();
        total += v;
    }
    const double t = total.value();
    for (auto& v : e) v /= t;
    return ProbabilityVector::make(e);
}

/// Multinomial draw by the conditional binomial method.
inline CountVector sample_multinomial(SeededRng& rng, const Hypothesis& hyp) {
    const std::size_t m = hyp.categories();
    std::vector<double> suffix(m + 1, 0.0);
    for (std::size_t j = m; j-- > 0;) suffix[j] = suffix[j + 1] + hyp.pi[j];
    std::vector<int> x(m, 0);
    int remaining = hyp.n;
    for (std::size_t j = 0; j + 1 < m && remaining > 0; ++j) {
        const double p = suffix[j] > 0.0 ? std::min(1.0, hyp.pi[j] / suffix[j]) : 0.0;
        x[j] = sample_binomial(rng, remaining, p);
        remaining -= x[j];
    }
    x[m - 1] += remaining;
    return CountVector::from_trusted(x);
}

/// Index of a categorical draw from probabilities f.
inline std::size_t sample_categorical(SeededRng& rng, std::span<const double> f) {
    const double u = rng.uniform();
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        if (f[j] > 0.0) last_positive = j;
        cum += f[j];
        if (u < cum && f[j] > 0.0) return j;
    }
    return last_positive;
}

/// Sum of one categorical outcome per forecast.
inline CountVector sample_generalized_multinomial(SeededRng& rng,
                                                  std::span<const ProbabilityVector> forecasts) {
    if (forecasts.empty()) throw Error(ErrorCode::EmptyList, "no forecasts given");
    const std::size_t m = forecasts.front().size();
    std::vector<int> x(m, 0);
    for (const auto& f : forecasts) {
        if (f.size() != m) throw Error(ErrorCode::DimensionMismatch, "forecasts differ in length");
        ++x[sample_categorical(rng, f.entries())];
    }
    return CountVector::from_trusted(x);
}

inline ProbabilityVector mean_forecast(std::span<const ProbabilityVector> forecasts) {
    if (forecasts.empty()) throw Error(ErrorCode::EmptyList, "no forecasts given");
    const std::size_t m = forecasts.front().size();
    std::vector<CompensatedSum> sums(m);
    for (const auto& f : forecasts) {
        if (f.size() != m) throw Error(ErrorCode::DimensionMismatch, "forecasts differ in length");
        for (std::size_t j = 0; j < m; ++j) sums[j] += f[j];
    }
    std::vector<double> mean(m);
    for (std::size_t j = 0; j < m; ++j) mean[j] = sums[j].value() / static_cast<double>(forecasts.size());
    return ProbabilityVector::make(mean, 1e-9);
}

struct McEstimate {
    double estimate = 1.0;
    double std_error = 0.0;
    int samples = 0;
};

namespace detail {

inline McEstimate add_one_estimate(long long hits, int samples) {
    McEstimate e;
    e.samples = samples;
    e.estimate = static_cast<double>(1 + hits) / static_cast<double>(samples + 1);
    e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / samples);
    return e;
}

template <class Draw>
std::map<StatisticKind, McEstimate> mc_estimates(const CountVector& x, const Hypothesis& hyp,
                                                 std::span<const StatisticKind> stats, int samples,
                                                 Draw&& draw) {
    if (samples < 1) throw Error(ErrorCode::InvalidConfig, "need at least one Monte Carlo sample");
    std::vector<StatisticEvaluator> evals;
    std::vector<double> tx;
    std::vector<long long> hits(stats.size(), 0);
    for (const auto& s : stats) {
        evals.emplace_back(s, hyp);
        tx.push_back(evals.back()(x.counts()));
    }
    for (int b = 0; b < samples; ++b) {
        const CountVector xb = draw();
        for (std::size_t k = 0; k < evals.size(); ++k)
            if (evals[k](xb.counts()) >= tx[k]) ++hits[k];
    }
    std::map<StatisticKind, McEstimate> out;
    for (std::size_t k = 0; k < stats.size(); ++k) out[stats[k]] = add_one_estimate(hits[k], samples);
    return out;
}

} // namespace detail

/// Add-one Monte Carlo p-values (1 + #{T(X_b) >= T(x)}) / (B + 1), all
/// statistics sharing the same draws.
inline std::map<StatisticKind, McEstimate> mc_p_values(const CountVector& x, const Hypothesis& hyp,
                                                       std::span<const StatisticKind> stats,
                                                       int samples, SeededRng& rng) {
    return detail::mc_estimates(x, hyp, stats, samples, [&] { return sample_multinomial(rng, hyp); });
}

inline McEstimate mc_p_value(const CountVector& x, const Hypothesis& hyp, StatisticKind stat,
                             int samples, SeededRng& rng) {
    const StatisticKind one[] = {stat};
    return mc_p_values(x, hyp, one, samples, rng).at(stat);
}

/// Monte Carlo p-value under the generalized multinomial law of the
/// forecasts; the statistic is evaluated against the mean forecast.
inline McEstimate mc_p_value_generalized(const CountVector& xbar,
                                         std::span<const ProbabilityVector> forecasts,
                                         StatisticKind stat, int samples, SeededRng& rng) {
    const ProbabilityVector mean = mean_forecast(forecasts);
    const Hypothesis hyp{static_cast<int>(forecasts.size()), mean};
    if (xbar.size() != hyp.categories() || xbar.total() != hyp.n)
        throw Error(ErrorCode::DimensionMismatch, "outcome counts do not match the forecasts");
    const StatisticKind one[] = {stat};
    return detail::mc_estimates(xbar, hyp, one, samples,
                                [&] { return sample_generalized_multinomial(rng, forecasts); })
        .at(stat);
}

} // namespace mnexact
