#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mnexact/asymptotics.hpp"
#include "mnexact/core_types.hpp"
#include "mnexact/error.hpp"
#include "mnexact/exact_test.hpp"
#include "mnexact/montecarlo.hpp"
#include "mnexact/numeric.hpp"
#include "mnexact/parse.hpp"

namespace mnexact {

/// Statistic slots used throughout the study: prob-mass, chisq, llr.
inline constexpr std::size_t kStudyStatistics = 3;

inline std::array<StatisticKind, kStudyStatistics> study_statistics() {
    return {StatisticKind::prob_mass(), StatisticKind::chisq(), StatisticKind::llr()};
}

struct StudyConfig {
    int pairs = 2000;
    int n = 100;
    int m = 5;
    double theta = kDefaultTheta;
    std::uint64_t seed = 1;
    int oracle_subset = 0;
    int mc_subset = 0;
    int mc_samples = kDefaultMonteCarloSamples;
};

inline void validate(const StudyConfig& c) {
    if (c.pairs < 1) throw Error(ErrorCode::InvalidConfig, "pairs must be >= 1");
    if (c.n < 1) throw Error(ErrorCode::NonpositiveN, "n must be >= 1");
    if (c.m < 2) throw Error(ErrorCode::TooFewCategories, "m must be >= 2");
    if (!(c.theta >= kMinTheta && c.theta < 1.0))
        throw Error(ErrorCode::ThetaOutOfRange, "theta must lie in [1e-8, 1)");
    if (c.oracle_subset < 0 || c.mc_subset < 0)
        throw Error(ErrorCode::InvalidConfig, "subset sizes must be nonnegative");
    if (c.mc_subset > 0 && c.mc_samples < 1)
        throw Error(ErrorCode::InvalidConfig, "mc_samples must be >= 1");
}

struct StudyRecord {
    StudyRecord(std::uint64_t seed_, int index_, ProbabilityVector pi_, CountVector x_)
        : seed(seed_), index(index_), pi(std::move(pi_)), x(std::move(x_)) {}

    std::uint64_t seed = 0;
    int index = 0;
    ProbabilityVector pi;
    CountVector x;
    std::array<std::optional<double>, kStudyStatistics> exact_p;
    std::array<bool, kStudyStatistics> below{};
    std::array<double, kStudyStatistics> asymptotic_p{};
    std::array<std::optional<double>, kStudyStatistics> full_p;
    std::array<std::optional<McEstimate>, kStudyStatistics> mc;
    std::int64_t evaluations = 0;
    std::int64_t rt_alg_ns = 0;
    std::optional<std::int64_t> rt_full_ns;
    std::optional<std::int64_t> rt_mc_ns;

    std::optional<double> mean_p() const {
        CompensatedSum s;
        for (const auto& p : exact_p) {
            if (!p) return std::nullopt;
            s += *p;
        }
        return s.value() / static_cast<double>(kStudyStatistics);
    }
};

namespace detail {

template <class F>
std::int64_t time_ns(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
}

} // namespace detail

/// One record of the study, drawn from child generator `index`.
inline StudyRecord run_study_record(const StudyConfig& c, int index) {
    const auto stats = study_statistics();
    SeededRng rng = SeededRng(c.seed).child(static_cast<std::uint64_t>(index));
    ProbabilityVector pi = sample_uniform_simplex(rng, static_cast<std::size_t>(c.m));
    const Hypothesis hyp{c.n, pi};
    StudyRecord rec(c.seed, index, std::move(pi), sample_multinomial(rng, hyp));

    std::map<StatisticKind, TestResult> res;
    rec.rt_alg_ns = detail::time_ns([&] { res = p_value_exact(rec.x, hyp, c.theta, stats); });
    for (std::size_t k = 0; k < kStudyStatistics; ++k) {
        const TestResult& r = res.at(stats[k]);
        rec.exact_p[k] = r.exact_p;
        rec.below[k] = r.below_threshold;
        rec.asymptotic_p[k] = r.asymptotic_p;
        rec.evaluations += r.evaluations;
    }
    if (index <= c.oracle_subset) {
        std::map<StatisticKind, double> full;
        rec.rt_full_ns = detail::time_ns([&] { full = p_values_full_enum(rec.x, hyp, stats); });
        for (std::size_t k = 0; k < kStudyStatistics; ++k) rec.full_p[k] = full.at(stats[k]);
    }
    if (index <= c.mc_subset) {
        SeededRng mc_rng = rng.child(0);
        std::map<StatisticKind, McEstimate> mc;
        rec.rt_mc_ns = detail::time_ns([&] { mc = mc_p_values(rec.x, hyp, stats, c.mc_samples, mc_rng); });
        for (std::size_t k = 0; k < kStudyStatistics; ++k) rec.mc[k] = mc.at(stats[k]);
    }
    return rec;
}

/// Records 1..pairs in index order. Every field except the timings is a
/// function of the configuration alone.
inline std::vector<StudyRecord> run_study(const StudyConfig& c) {
    validate(c);
    std::vector<StudyRecord> out;
    out.reserve(static_cast<std::size_t>(c.pairs));
    for (int i = 1; i <= c.pairs; ++i) out.push_back(run_study_record(c, i));
    return out;
}

inline double relative_error(double approx, double exact) {
    if (!(exact > 0.0)) throw Error(ErrorCode::ExactZero, "relative error needs exact > 0");
    return (approx - exact) / exact;
}

inline double relative_difference(double a, double b) {
    if (a < 0.0 || b < 0.0) throw Error(ErrorCode::InvalidConfig, "p-values must be nonnegative");
    if (a == 0.0 && b == 0.0) throw Error(ErrorCode::BothZero, "both p-values are zero");
    return (a - b) / ((a + b) / 2.0);
}

/// Nearest-rank quantile of an ascending sample: element ceil(q N), 1-based.
inline double nearest_rank_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw Error(ErrorCode::EmptyList, "quantile of an empty sample");
    const double rank = std::ceil(q * static_cast<double>(sorted.size()));
    const auto idx = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(sorted.size()))) - 1;
    return sorted[idx];
}

struct GroupSummary {
    int group_index = 0;
    std::size_t count = 0;
    double mean_p_min = 0.0;
    double mean_p_max = 0.0;
    double mean_runtime_ns = 0.0;
    double runtime_q05_ns = 0.0;
    double runtime_q95_ns = 0.0;
    /// Asymptotic vs exact, per statistic.
    std::array<double, kStudyStatistics> mean_relative_error{};
    /// Pairs (prob-mass, chisq), (prob-mass, llr), (chisq, llr).
    std::array<double, 3> mean_relative_difference{};
};

inline constexpr std::array<std::pair<std::size_t, std::size_t>, 3> kStatisticPairs{{{0, 1}, {0, 2}, {1, 2}}};

/// Orders the records with all exact p-values by mean p and summarizes
/// consecutive blocks of `group_size`. Other records are ignored.
inline std::vector<GroupSummary> group_summaries(const std::vector<StudyRecord>& records,
                                                 int group_size = 1000) {
    if (group_size < 1) throw Error(ErrorCode::InvalidConfig, "group size must be >= 1");
    std::vector<std::pair<double, const StudyRecord*>> ordered;
    for (const auto& r : records)
        if (auto mp = r.mean_p()) ordered.emplace_back(*mp, &r);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<GroupSummary> out;
    const auto gs = static_cast<std::size_t>(group_size);
    for (std::size_t start = 0; start < ordered.size(); start += gs) {
        const std::size_t stop = std::min(ordered.size(), start + gs);
        GroupSummary g;
        g.group_index = static_cast<int>(out.size());
        g.count = stop - start;
        g.mean_p_min = ordered[start].first;
        g.mean_p_max = ordered[stop - 1].first;
        std::vector<double> rt;
        CompensatedSum rt_sum;
        std::array<CompensatedSum, kStudyStatistics> err;
        std::array<CompensatedSum, 3> diff;
        for (std::size_t i = start; i < stop; ++i) {
            const StudyRecord& r = *ordered[i].second;
            rt.push_back(static_cast<double>(r.rt_alg_ns));
            rt_sum += static_cast<double>(r.rt_alg_ns);
            for (std::size_t k = 0; k < kStudyStatistics; ++k)
                err[k] += relative_error(r.asymptotic_p[k], *r.exact_p[k]);
            for (std::size_t k = 0; k < kStatisticPairs.size(); ++k)
                diff[k] += relative_difference(*r.exact_p[kStatisticPairs[k].first],
                                               *r.exact_p[kStatisticPairs[k].second]);
        }
        const auto cnt = static_cast<double>(g.count);
        std::sort(rt.begin(), rt.end());
        g.mean_runtime_ns = rt_sum.value() / cnt;
        g.runtime_q05_ns = nearest_rank_quantile(rt, 0.05);
        g.runtime_q95_ns = nearest_rank_quantile(rt, 0.95);
        for (std::size_t k = 0; k < kStudyStatistics; ++k) g.mean_relative_error[k] = err[k].value() / cnt;
        for (std::size_t k = 0; k < 3; ++k) g.mean_relative_difference[k] = diff[k].value() / cnt;
        out.push_back(g);
    }
    return out;
}

/// Comma-separated record table with a header row. Absent values are
/// empty fields; with `timings` false all runtime fields are empty.
inline void write_study_csv(std::ostream& os, const std::vector<StudyRecord>& records, bool timings = true) {
    const std::size_t m = records.empty() ? 0 : records.front().pi.size();
    os << "seed,index";
    for (std::size_t j = 1; j <= m; ++j) os << ",pi_" << j;
    for (std::size_t j = 1; j <= m; ++j) os << ",x_" << j;
    os << ",p_prob,p_chisq,p_llr,below_prob,below_chisq,below_llr,ap_prob,ap_chisq,ap_llr,"
          "rt_alg_ns,rt_full_ns,rt_mc_ns\n";
    for (const auto& r : records) {
        os << r.seed << ',' << r.index;
        for (double p : r.pi.entries()) os << ',' << format_double(p);
        for (int v : r.x.counts()) os << ',' << v;
        for (const auto& p : r.exact_p) {
            os << ',';
            if (p) os << format_double(*p);
        }
        for (bool b : r.below) os << ',' << (b ? 1 : 0);
        for (double a : r.asymptotic_p) os << ',' << format_double(a);
        os << ',';
        if (timings) os << r.rt_alg_ns;
        os << ',';
        if (timings && r.rt_full_ns) os << *r.rt_full_ns;
        os << ',';
        if (timings && r.rt_mc_ns) os << *r.rt_mc_ns;
        os << '\n';
    }
}

/// One JSON object per line, one line per group.
inline void write_group_summaries(std::ostream& os, const std::vector<GroupSummary>& groups) {
    auto arr = [&](const auto& a) {
        os << '[';
        for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << format_double(a[i]);
        os << ']';
    };
    for (const auto& g : groups) {
        os << "{\"group_index\":" << g.group_index << ",\"count\":" << g.count << ",\"mean_p_range\":["
           << format_double(g.mean_p_min) << ',' << format_double(g.mean_p_max)
           << "],\"mean_runtime_ns\":" << format_double(g.mean_runtime_ns)
           << ",\"runtime_q05_ns\":" << format_double(g.runtime_q05_ns)
           << ",\"runtime_q95_ns\":" << format_double(g.runtime_q95_ns) << ",\"mean_relative_error\":";
        arr(g.mean_relative_error);
        os << ",\"mean_relative_difference\":";
        arr(g.mean_relative_difference);
        os << "}\n";
    }
}

/// Ranks with ties averaged, 1-based.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) rank[idx[k]] = avg;
        i = j;
    }
    return rank;
}

inline double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw Error(ErrorCode::DimensionMismatch, "correlation needs two samples of equal length >= 2");
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

inline double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    return pearson_correlation(average_ranks(a), average_ranks(b));
}

/// sup |F_n(u) - u| for a sample on [0, 1].
inline double uniform_ecdf_distance(std::vector<double> sample) {
    if (sample.empty()) throw Error(ErrorCode::EmptyList, "empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double u = std::clamp(sample[i], 0.0, 1.0);
        d = std::max({d, static_cast<double>(i + 1) / n - u, u - static_cast<double>(i) / n});
    }
    return d;
}

} // namespace mnexact
