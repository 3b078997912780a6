#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mnexact/core_types.hpp"
#include "mnexact/error.hpp"
#include "mnexact/lattice.hpp"
#include "mnexact/numeric.hpp"
#include "mnexact/statistics.hpp"

namespace mnexact {

/// Tail masses within this of alpha count as equal to alpha.
inline constexpr double kSizeSlack = 1e-13;

/// Randomized test of exact size alpha: reject when T > threshold, reject
/// with probability gamma when T == threshold.
struct RandomizedTest {
    Hypothesis hyp;
    StatisticKind stat = StatisticKind::prob_mass();
    double alpha = 0.0;
    double threshold = 0.0;
    double gamma = 0.0;
    double boundary_mass = 0.0;  // P(T = threshold)
    double upper_mass = 0.0;     // P(T > threshold)
    std::int64_t count_below = 0;     // #{x : T(x) < threshold}
    std::int64_t count_boundary = 0;  // #{x : T(x) == threshold}

    double critical(double t) const noexcept {
        if (t < threshold) return 0.0;
        if (t == threshold) return gamma;
        return 1.0;
    }
    double size() const noexcept { return upper_mass + gamma * boundary_mass; }
};

/// Builds the randomized test from the exact null distribution of T,
/// obtained by full enumeration.
inline RandomizedTest build_randomized_test(const Hypothesis& hyp, double alpha, StatisticKind stat) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in (0, 1)");
    if (!hyp.pi.strictly_positive())
        throw Error(ErrorCode::ZeroProbabilityCategory, "randomized tests need every pi_j > 0");

    const StatisticEvaluator eval(stat, hyp);
    const LogPmfEvaluator logf(hyp);
    std::vector<std::pair<double, double>> dist;  // (T, f)
    dist.reserve(simplex_size(hyp.n, hyp.categories()));
    enumerate_full(hyp.n, hyp.categories(), [&](std::span<const int> z) {
        dist.emplace_back(eval(z), std::exp(logf(z)));
    });
    std::sort(dist.begin(), dist.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    RandomizedTest rt{hyp, stat, alpha};
    CompensatedSum upper;
    std::size_t i = 0;
    bool found = false;
    while (i < dist.size()) {
        const double level = dist[i].first;
        CompensatedSum group;
        std::size_t j = i;
        while (j < dist.size() && dist[j].first == level) group += dist[j++].second;
        CompensatedSum with_group = upper;
        with_group += group;
        // `level` is the smallest attained value with P(T > level) <= alpha
        // once including the next lower group would exceed alpha. The slack
        // absorbs rounding in the enumerated masses.
        if (with_group.value() > alpha + kSizeSlack || j == dist.size()) {
            rt.threshold = level;
            rt.upper_mass = upper.value();
            rt.boundary_mass = group.value();
            rt.count_boundary = static_cast<std::int64_t>(j - i);
            rt.count_below = static_cast<std::int64_t>(dist.size() - j);
            found = true;
            break;
        }
        upper = with_group;
        i = j;
    }
    if (!found || !(rt.boundary_mass > 0.0))
        throw Error(ErrorCode::InfeasibleSize, "no attained value yields size alpha");
    rt.gamma = std::clamp((alpha - rt.upper_mass) / rt.boundary_mass, 0.0, 1.0);
    return rt;
}

/// Probability of rejection when the data follow M(n, p).
inline double power(const RandomizedTest& rt, std::span<const double> p) {
    if (p.size() != rt.hyp.categories())
        throw Error(ErrorCode::DimensionMismatch, "alternative has the wrong number of categories");
    const StatisticEvaluator eval(rt.stat, rt.hyp);
    const LogPmfEvaluator logf(p, rt.hyp.n);
    CompensatedSum s;
    enumerate_full(rt.hyp.n, rt.hyp.categories(), [&](std::span<const int> z) {
        const double phi = rt.critical(eval(z));
        if (phi > 0.0) s += phi * std::exp(logf(z));
    });
    return s.value();
}

inline double power(const RandomizedTest& rt, const ProbabilityVector& p) { return power(rt, p.entries()); }

/// The alternative p(q, i): coordinate i set to q, the others scaled
/// proportionally to pi. `axis` is 1-based.
inline std::vector<double> line_alternative(const ProbabilityVector& pi, std::size_t axis, double q) {
    if (axis < 1 || axis > pi.size())
        throw Error(ErrorCode::AxisOutOfRange, "axis must lie in 1.." + std::to_string(pi.size()));
    const std::size_t i = axis - 1;
    std::vector<double> p(pi.entries().begin(), pi.entries().end());
    if (q == pi[i]) return p;
    const double scale = (1.0 - q) / (1.0 - pi[i]);
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = j == i ? q : scale * pi[j];
    return p;
}

struct PowerPoint {
    double q;
    double power;
};

inline std::vector<PowerPoint> power_curve(const Hypothesis& hyp, double alpha, StatisticKind stat,
                                           std::size_t axis, std::span<const double> q_grid) {
    if (axis < 1 || axis > hyp.categories())
        throw Error(ErrorCode::AxisOutOfRange, "axis must lie in 1.." + std::to_string(hyp.categories()));
    for (double q : q_grid)
        if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::InvalidConfig, "q must lie in [0, 1]");
    const RandomizedTest rt = build_randomized_test(hyp, alpha, stat);
    std::vector<PowerPoint> out;
    out.reserve(q_grid.size());
    for (double q : q_grid) out.push_back({q, power(rt, line_alternative(hyp.pi, axis, q))});
    return out;
}

/// sum over the simplex of (1 - phi(x)).
inline double region_weight(const RandomizedTest& rt) {
    return static_cast<double>(rt.count_below) + (1.0 - rt.gamma) * static_cast<double>(rt.count_boundary);
}

/// Powers closer than this are treated as equal when ranking statistics.
inline constexpr double kNearlyEqualPower = 1e-4;

/// Bit k set iff statistic k is within `tolerance` of the best power.
inline unsigned best_statistics(std::span<const double> powers, double tolerance = kNearlyEqualPower) {
    const double best = *std::max_element(powers.begin(), powers.end());
    unsigned mask = 0;
    for (std::size_t k = 0; k < powers.size(); ++k)
        if (best - powers[k] < tolerance) mask |= 1u << k;
    return mask;
}

inline unsigned worst_statistics(std::span<const double> powers, double tolerance = kNearlyEqualPower) {
    const double worst = *std::min_element(powers.begin(), powers.end());
    unsigned mask = 0;
    for (std::size_t k = 0; k < powers.size(); ++k)
        if (powers[k] - worst < tolerance) mask |= 1u << k;
    return mask;
}

struct PowerMapCell {
    std::vector<double> alternative;
    std::vector<double> powers;  // one per statistic, in the order given
    unsigned best = 0;
    unsigned worst = 0;
};

/// Powers of several randomized tests over the ternary grid of alternatives
/// (i/h, j/h, k/h). Data behind best/worst statistic maps.
inline std::vector<PowerMapCell> power_map(const Hypothesis& hyp, double alpha,
                                           std::span<const StatisticKind> stats, int resolution) {
    if (resolution < 1) throw Error(ErrorCode::InvalidConfig, "resolution must be positive");
    std::vector<RandomizedTest> tests;
    for (const auto& s : stats) tests.push_back(build_randomized_test(hyp, alpha, s));
    std::vector<PowerMapCell> cells;
    enumerate_full(resolution, hyp.categories(), [&](std::span<const int> g) {
        PowerMapCell c;
        for (int v : g) c.alternative.push_back(static_cast<double>(v) / resolution);
        for (const auto& t : tests) c.powers.push_back(power(t, c.alternative));
        c.best = best_statistics(c.powers);
        c.worst = worst_statistics(c.powers);
        cells.push_back(std::move(c));
    });
    return cells;
}

} // namespace mnexact
