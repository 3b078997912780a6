#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "mnexact/parse.hpp"
#include "mnexact/simstudy.hpp"

using namespace mnexact;

namespace {

StudyConfig small_config() {
    StudyConfig c;
    c.pairs = 10;
    c.n = 20;
    c.m = 3;
    c.seed = 7;
    return c;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

} // namespace

TEST(RelativeError, Examples) {
    EXPECT_EQ(relative_error(0.05, 0.05), 0.0);
    EXPECT_NEAR(relative_error(0.0092, 0.0068), 0.35294117647, 1e-10);
    EXPECT_NEAR(relative_error(0.0073, 0.0190), -0.61578947368, 1e-10);
    try {
        relative_error(0.1, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ExactZero);
    }
}

TEST(RelativeDifference, Examples) {
    EXPECT_EQ(relative_difference(0.3, 0.3), 0.0);
    EXPECT_NEAR(relative_difference(0.0190, 0.0126), 0.40506329113, 1e-10);
    EXPECT_EQ(relative_difference(0.2, 0.7), -relative_difference(0.7, 0.2));
    EXPECT_EQ(relative_difference(0.0, 0.4), -2.0);
    try {
        relative_difference(0.0, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BothZero);
    }
    EXPECT_THROW(relative_difference(-0.1, 0.2), Error);
}

TEST(Quantile, NearestRank) {
    const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    EXPECT_EQ(nearest_rank_quantile(v, 0.05), 1);
    EXPECT_EQ(nearest_rank_quantile(v, 0.95), 10);
    EXPECT_EQ(nearest_rank_quantile(v, 0.5), 5);
    EXPECT_EQ(nearest_rank_quantile({3.5}, 0.05), 3.5);
    EXPECT_THROW(nearest_rank_quantile({}, 0.5), Error);
}

TEST(StudyConfig, Validation) {
    StudyConfig c = small_config();
    c.pairs = 0;
    EXPECT_THROW(validate(c), Error);
    c = small_config();
    c.m = 1;
    EXPECT_THROW(validate(c), Error);
    c = small_config();
    c.theta = 0.5e-8;
    EXPECT_THROW(validate(c), Error);
    EXPECT_NO_THROW(validate(small_config()));
}

TEST(Study, RecordsAreDeterministic) {
    const auto a = run_study(small_config());
    const auto b = run_study(small_config());
    ASSERT_EQ(a.size(), 10u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].index, static_cast<int>(i + 1));
        EXPECT_EQ(a[i].x, b[i].x);
        EXPECT_TRUE(std::equal(a[i].pi.entries().begin(), a[i].pi.entries().end(), b[i].pi.entries().begin()));
        EXPECT_EQ(a[i].exact_p, b[i].exact_p);
        EXPECT_EQ(a[i].x.total(), 20);
    }
    // a record depends only on the seed and its index
    const auto one = run_study_record(small_config(), 4);
    EXPECT_EQ(one.x, a[3].x);
}

TEST(Study, RecordInvariants) {
    StudyConfig c = small_config();
    c.pairs = 30;
    c.oracle_subset = 30;
    c.mc_subset = 5;
    c.mc_samples = 500;
    for (const auto& r : run_study(c)) {
        bool all = true;
        for (std::size_t k = 0; k < kStudyStatistics; ++k) {
            EXPECT_NE(r.exact_p[k].has_value(), r.below[k]);
            all = all && r.exact_p[k].has_value();
            ASSERT_TRUE(r.full_p[k]);
            if (r.exact_p[k]) {
                EXPECT_NEAR(*r.exact_p[k], *r.full_p[k], 1e-10);
            }
            EXPECT_EQ(r.mc[k].has_value(), r.index <= 5);
        }
        EXPECT_EQ(r.mean_p().has_value(), all);
        EXPECT_TRUE(r.rt_full_ns);
        EXPECT_EQ(r.rt_mc_ns.has_value(), r.index <= 5);
        EXPECT_GT(r.evaluations, 0);
    }
}

TEST(GroupSummaries, Blocks) {
    const auto recs = run_study(small_config());
    std::size_t with_mean = 0;
    for (const auto& r : recs) with_mean += r.mean_p() ? 1 : 0;
    const auto groups = group_summaries(recs, 5);
    std::size_t total = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        total += groups[g].count;
        EXPECT_EQ(groups[g].group_index, static_cast<int>(g));
        EXPECT_LE(groups[g].mean_p_min, groups[g].mean_p_max);
        EXPECT_LE(groups[g].runtime_q05_ns, groups[g].runtime_q95_ns);
        if (g > 0) {
            EXPECT_LE(groups[g - 1].mean_p_max, groups[g].mean_p_min);
        }
    }
    EXPECT_EQ(total, with_mean);
    EXPECT_EQ(groups.size(), (with_mean + 4) / 5);
    EXPECT_THROW(group_summaries(recs, 0), Error);
}

TEST(GroupSummaries, SingleRecord) {
    StudyConfig c = small_config();
    c.pairs = 1;
    auto recs = run_study(c);
    ASSERT_TRUE(recs[0].mean_p());
    const auto groups = group_summaries(recs, 1000);
    ASSERT_EQ(groups.size(), 1u);
    EXPECT_EQ(groups[0].mean_p_min, groups[0].mean_p_max);
    EXPECT_EQ(groups[0].runtime_q05_ns, groups[0].mean_runtime_ns);
    EXPECT_EQ(groups[0].runtime_q95_ns, groups[0].mean_runtime_ns);
    EXPECT_NEAR(groups[0].mean_relative_error[1],
                relative_error(recs[0].asymptotic_p[1], *recs[0].exact_p[1]), 1e-15);
}

TEST(GroupSummaries, SameSeedSameGroups) {
    const auto a = group_summaries(run_study(small_config()), 3);
    const auto b = group_summaries(run_study(small_config()), 3);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t g = 0; g < a.size(); ++g) {
        EXPECT_EQ(a[g].mean_p_min, b[g].mean_p_min);
        EXPECT_EQ(a[g].mean_relative_error, b[g].mean_relative_error);
        EXPECT_EQ(a[g].mean_relative_difference, b[g].mean_relative_difference);
    }
    std::ostringstream os;
    write_group_summaries(os, a);
    EXPECT_EQ(lines(os.str()).size(), a.size());
    EXPECT_EQ(os.str().rfind("{\"group_index\":0,", 0), 0u);
}

TEST(StudyCsv, HeaderAndColumns) {
    StudyConfig c = small_config();
    c.oracle_subset = 2;
    const auto recs = run_study(c);
    std::ostringstream os;
    write_study_csv(os, recs);
    const auto ls = lines(os.str());
    ASSERT_EQ(ls.size(), 11u);
    EXPECT_EQ(ls[0], "seed,index,pi_1,pi_2,pi_3,x_1,x_2,x_3,p_prob,p_chisq,p_llr,below_prob,below_chisq,below_llr,"
                     "ap_prob,ap_chisq,ap_llr,rt_alg_ns,rt_full_ns,rt_mc_ns");
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto f = split(ls[i], ',');
        ASSERT_EQ(f.size(), 20u);
        EXPECT_EQ(f[0], "7");
        EXPECT_EQ(f[1], std::to_string(i));
        EXPECT_FALSE(f[17].empty());
        EXPECT_EQ(f[18].empty(), i > 2);
        EXPECT_TRUE(f[19].empty());
        for (std::size_t k = 11; k < 14; ++k) EXPECT_TRUE(f[k] == "0" || f[k] == "1");
        for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(f[8 + k].empty(), f[11 + k] == "1");
        const auto x1 = parse_integer(f[5]);
        ASSERT_TRUE(x1);
        EXPECT_EQ(*x1, recs[i - 1].x.counts()[0]);
    }
}

TEST(StudyCsv, WithoutTimingsIsReproducible) {
    std::ostringstream a, b;
    write_study_csv(a, run_study(small_config()), false);
    write_study_csv(b, run_study(small_config()), false);
    EXPECT_EQ(a.str(), b.str());
    const auto ls = lines(a.str());
    const auto f = split(ls[1], ',');
    EXPECT_TRUE(f[17].empty());
}

TEST(Analysis, Ranks) {
    const auto r = average_ranks({10, 20, 20, 5});
    EXPECT_EQ(r, (std::vector<double>{2, 3.5, 3.5, 1}));
    EXPECT_NEAR(spearman_correlation({1, 2, 3, 4}, {10, 9, 8, 1}), -1.0, 1e-15);
    EXPECT_NEAR(pearson_correlation({1, 2, 3}, {2, 4, 6}), 1.0, 1e-15);
    EXPECT_THROW(pearson_correlation({1}, {1}), Error);
}

TEST(Analysis, UniformEcdfDistance) {
    EXPECT_NEAR(uniform_ecdf_distance({0.5}), 0.5, 1e-15);
    EXPECT_NEAR(uniform_ecdf_distance({0.125, 0.375, 0.625, 0.875}), 0.125, 1e-15);
    EXPECT_THROW(uniform_ecdf_distance({}), Error);
}
