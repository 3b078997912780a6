#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mnexact/error.hpp"
#include "mnexact/numeric.hpp"

namespace mnexact {

inline constexpr double kProbabilitySumTolerance = 1e-12;

/// A point of the unit simplex. Only constructible through validation.
class ProbabilityVector {
public:
    /// Accepts entries whose sum is within `tolerance` of one. If the
    /// compensated sum is not exactly 1.0 the entries are divided by it.
    static ProbabilityVector make(std::span<const double> raw,
                                  double tolerance = kProbabilitySumTolerance) {
        if (raw.size() < 2)
            throw Error(ErrorCode::TooFewCategories,
                        "need at least 2 categories, got " + std::to_string(raw.size()));
        for (std::size_t j = 0; j < raw.size(); ++j) {
            if (!std::isfinite(raw[j]) || raw[j] < 0.0)
                throw Error(ErrorCode::NegativeEntry,
                            "entry " + std::to_string(j + 1) + " is not a nonnegative number");
            if (raw[j] > 1.0)
                throw Error(ErrorCode::SumNotOne,
                            "entry " + std::to_string(j + 1) + " exceeds 1");
        }
        const double sum = compensated_sum(raw);
        if (!(std::abs(sum - 1.0) <= tolerance)) {
            std::ostringstream os;
            os.precision(17);
            os << "entries sum to " << sum;
            throw Error(ErrorCode::SumNotOne, os.str());
        }
        std::vector<double> entries(raw.begin(), raw.end());
        if (sum != 1.0)
            for (double& e : entries) e /= sum;
        return ProbabilityVector(std::move(entries));
    }

    std::size_t size() const noexcept { return entries_.size(); }
    double operator[](std::size_t j) const noexcept { return entries_[j]; }
    std::span<const double> entries() const noexcept { return entries_; }
    bool strictly_positive() const noexcept {
        for (double e : entries_)
            if (!(e > 0.0)) return false;
        return true;
    }

    friend bool operator==(const ProbabilityVector&, const ProbabilityVector&) = default;

private:
    explicit ProbabilityVector(std::vector<double> e) : entries_(std::move(e)) {}
    std::vector<double> entries_;
};

/// Simple null hypothesis: n trials with cell probabilities pi.
struct Hypothesis {
    int n = 0;
    ProbabilityVector pi;

    std::size_t categories() const noexcept { return pi.size(); }
    /// Expected count n * pi_j.
    double expected(std::size_t j) const noexcept { return n * pi[j]; }
};

inline Hypothesis validate_hypothesis(std::span<const double> pi, long long n) {
    if (n < 1)
        throw Error(ErrorCode::NonpositiveN, "n must be positive, got " + std::to_string(n));
    if (n > 100'000'000)
        throw Error(ErrorCode::NonpositiveN, "n is too large: " + std::to_string(n));
    return Hypothesis{static_cast<int>(n), ProbabilityVector::make(pi)};
}

/// An observation in the discrete simplex.
class CountVector {
public:
    static CountVector make(std::span<const long long> raw, long long total) {
        std::vector<int> counts;
        counts.reserve(raw.size());
        long long sum = 0;
        for (std::size_t j = 0; j < raw.size(); ++j) {
            if (raw[j] < 0)
                throw Error(ErrorCode::NegativeCount,
                            "count " + std::to_string(j + 1) + " is negative");
            sum += raw[j];
            counts.push_back(static_cast<int>(raw[j]));
        }
        if (sum != total)
            throw Error(ErrorCode::WrongTotal, "counts sum to " + std::to_string(sum) +
                                                   ", expected " + std::to_string(total));
        return CountVector(std::move(counts), static_cast<int>(total));
    }

    /// For points already known to lie on the simplex (enumeration output).
    static CountVector from_trusted(std::span<const int> counts) {
        int total = 0;
        for (int c : counts) total += c;
        return CountVector(std::vector<int>(counts.begin(), counts.end()), total);
    }

    std::size_t size() const noexcept { return counts_.size(); }
    int total() const noexcept { return total_; }
    int operator[](std::size_t j) const noexcept { return counts_[j]; }
    std::span<const int> counts() const noexcept { return counts_; }

    friend bool operator==(const CountVector&, const CountVector&) = default;
    friend auto operator<=>(const CountVector& a, const CountVector& b) {
        return a.counts_ <=> b.counts_;
    }

private:
    CountVector(std::vector<int> c, int total) : counts_(std::move(c)), total_(total) {}
    std::vector<int> counts_;
    int total_ = 0;
};

inline CountVector validate_counts(std::span<const long long> x, const Hypothesis& hyp) {
    if (x.size() != hyp.categories())
        throw Error(ErrorCode::WrongLength, "expected " + std::to_string(hyp.categories()) +
                                                " counts, got " + std::to_string(x.size()));
    return CountVector::make(x, hyp.n);
}

inline CountVector validate_counts(std::span<const int> x, const Hypothesis& hyp) {
    std::vector<long long> wide(x.begin(), x.end());
    return validate_counts(std::span<const long long>(wide), hyp);
}

/// Test statistic selector.
class StatisticKind {
public:
    enum class Family { ProbMass, PowerDivergence };

    static constexpr StatisticKind prob_mass() noexcept { return StatisticKind(Family::ProbMass, 0.0); }
    static StatisticKind power_divergence(double lambda) {
        if (!std::isfinite(lambda))
            throw Error(ErrorCode::UnsupportedLambda, "lambda must be finite");
        if (lambda <= -1.0)
            throw Error(ErrorCode::UnsupportedLambda,
                        "lambda <= -1 is not supported");
        return StatisticKind(Family::PowerDivergence, lambda);
    }
    static constexpr StatisticKind chisq() noexcept { return StatisticKind(Family::PowerDivergence, 1.0); }
    static constexpr StatisticKind llr() noexcept { return StatisticKind(Family::PowerDivergence, 0.0); }

    constexpr Family family() const noexcept { return family_; }
    constexpr bool is_prob_mass() const noexcept { return family_ == Family::ProbMass; }
    constexpr double lambda() const noexcept { return lambda_; }

    std::string name() const {
        if (is_prob_mass()) return "prob-mass";
        if (lambda_ == 1.0) return "chisq";
        if (lambda_ == 0.0) return "llr";
        std::ostringstream os;
        os << "pd:" << lambda_;
        return os.str();
    }

    friend constexpr bool operator==(const StatisticKind&, const StatisticKind&) = default;
    friend constexpr std::partial_ordering operator<=>(const StatisticKind& a,
                                                       const StatisticKind& b) {
        if (a.family_ != b.family_) return a.family_ <=> b.family_;
        return a.lambda_ <=> b.lambda_;
    }

private:
    constexpr StatisticKind(Family f, double l) noexcept : family_(f), lambda_(l) {}
    Family family_;
    double lambda_;
};

/// The three statistics compared throughout: probability mass, Pearson, G.
inline std::vector<StatisticKind> standard_statistics() {
    return {StatisticKind::prob_mass(), StatisticKind::chisq(), StatisticKind::llr()};
}

/// Per-statistic output of the exact test.
struct TestResult {
    StatisticKind statistic = StatisticKind::prob_mass();
    double statistic_value = 0.0;
    std::optional<double> exact_p;
    bool below_threshold = false;
    double asymptotic_p = 1.0;
    std::int64_t evaluations = 0;
    double theta = 0.0;

    /// The value reported when only a number is wanted: 0 below threshold.
    double p_or_zero() const noexcept { return exact_p.value_or(0.0); }
};

} // namespace mnexact
