#include <gtest/gtest.h>

#include <functional>
#include <vector>

#include "mnexact/core_types.hpp"
#include "mnexact/parse.hpp"

using namespace mnexact;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::Io;
}

} // namespace

TEST(Hypothesis, SymmetricTwoCategories) {
    const std::vector<double> pi{0.5, 0.5};
    const Hypothesis h = validate_hypothesis(pi, 10);
    EXPECT_EQ(h.n, 10);
    EXPECT_EQ(h.categories(), 2u);
    EXPECT_EQ(h.pi[0], 0.5);
}

TEST(Hypothesis, SumNotOne) {
    const std::vector<double> pi{0.5, 0.6};
    EXPECT_EQ(code_of([&] { validate_hypothesis(pi, 10); }), ErrorCode::SumNotOne);
}

TEST(Hypothesis, ThreeCategoryNullKeepsEntries) {
    const std::vector<double> pi{0.2, 0.5, 0.3};
    const Hypothesis h = validate_hypothesis(pi, 50);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(h.pi[j], pi[j]);
    EXPECT_DOUBLE_EQ(h.expected(1), 25.0);
}

TEST(Hypothesis, Rejections) {
    EXPECT_EQ(code_of([] { validate_hypothesis(std::vector<double>{1.0}, 3); }), ErrorCode::TooFewCategories);
    EXPECT_EQ(code_of([] { validate_hypothesis(std::vector<double>{-0.1, 1.1}, 3); }), ErrorCode::NegativeEntry);
    EXPECT_EQ(code_of([] { validate_hypothesis(std::vector<double>{0.5, 0.5}, 0); }), ErrorCode::NonpositiveN);
    EXPECT_EQ(code_of([] { validate_hypothesis(std::vector<double>{0.5, 0.5}, -4); }), ErrorCode::NonpositiveN);
    EXPECT_EQ(code_of([] { validate_hypothesis(std::vector<double>{NAN, 0.5}, 3); }), ErrorCode::NegativeEntry);
}

TEST(Hypothesis, ToleranceBoundary) {
    EXPECT_NO_THROW(validate_hypothesis(std::vector<double>{0.5, 0.5 + 5e-13}, 3));
    EXPECT_EQ(code_of([] { validate_hypothesis(std::vector<double>{0.5, 0.5 + 1e-11}, 3); }), ErrorCode::SumNotOne);
}

TEST(Hypothesis, RenormalizesNearOneSums) {
    const std::vector<double> pi{1.0 / 3, 1.0 / 3, 1.0 / 3 + 4e-13};
    const Hypothesis h = validate_hypothesis(pi, 3);
    EXPECT_NEAR(h.pi[0] + h.pi[1] + h.pi[2], 1.0, 1e-15);
}

TEST(Hypothesis, ZeroEntriesAllowed) {
    const Hypothesis h = validate_hypothesis(std::vector<double>{0.0, 0.6, 0.4}, 5);
    EXPECT_FALSE(h.pi.strictly_positive());
}

TEST(Counts, ReferenceObservation) {
    const Hypothesis h = validate_hypothesis(std::vector<double>{0.1, 0.7, 0.2}, 50);
    const CountVector x = validate_counts(std::vector<long long>{4, 40, 6}, h);
    EXPECT_EQ(x.total(), 50);
    EXPECT_EQ(x[1], 40);
}

TEST(Counts, Rejections) {
    const Hypothesis h = validate_hypothesis(std::vector<double>{0.1, 0.7, 0.2}, 50);
    EXPECT_EQ(code_of([&] { validate_counts(std::vector<long long>{4, 40, 7}, h); }), ErrorCode::WrongTotal);
    EXPECT_EQ(code_of([&] { validate_counts(std::vector<long long>{-1, 41, 10}, h); }), ErrorCode::NegativeCount);
    EXPECT_EQ(code_of([&] { validate_counts(std::vector<long long>{4, 46}, h); }), ErrorCode::WrongLength);
}

TEST(Counts, RoundTripIsIdentity) {
    const std::vector<double> pi{0.25, 0.25, 0.5};
    const std::vector<long long> raw{3, 2, 5};
    const Hypothesis h = validate_hypothesis(pi, 10);
    const CountVector x = validate_counts(raw, h);
    const Hypothesis h2 = validate_hypothesis(h.pi.entries(), h.n);
    std::vector<long long> back(x.counts().begin(), x.counts().end());
    EXPECT_EQ(h2.pi, h.pi);
    EXPECT_EQ(back, raw);
    EXPECT_EQ(validate_counts(back, h2), x);
}

TEST(StatisticKind, NamesAndOrder) {
    EXPECT_EQ(StatisticKind::prob_mass().name(), "prob-mass");
    EXPECT_EQ(StatisticKind::chisq().name(), "chisq");
    EXPECT_EQ(StatisticKind::llr().name(), "llr");
    EXPECT_EQ(StatisticKind::power_divergence(1.0), StatisticKind::chisq());
    EXPECT_EQ(StatisticKind::power_divergence(0.0), StatisticKind::llr());
    EXPECT_EQ(StatisticKind::power_divergence(1.5).name(), "pd:1.5");
    EXPECT_TRUE(StatisticKind::prob_mass() < StatisticKind::llr());
    EXPECT_TRUE(StatisticKind::llr() < StatisticKind::chisq());
}

TEST(StatisticKind, UnsupportedLambda) {
    EXPECT_EQ(code_of([] { StatisticKind::power_divergence(-1.0); }), ErrorCode::UnsupportedLambda);
    EXPECT_EQ(code_of([] { StatisticKind::power_divergence(-2.0); }), ErrorCode::UnsupportedLambda);
    EXPECT_EQ(code_of([] { StatisticKind::power_divergence(INFINITY); }), ErrorCode::UnsupportedLambda);
    EXPECT_NO_THROW(StatisticKind::power_divergence(-0.5));
}

TEST(Parse, RealsAndFractions) {
    EXPECT_EQ(*parse_real("0.25"), 0.25);
    EXPECT_EQ(*parse_real(" 1/3 "), 1.0 / 3.0);
    EXPECT_FALSE(parse_real("1/0"));
    EXPECT_FALSE(parse_real("abc"));
    EXPECT_FALSE(parse_real(""));
    const auto v = parse_real_list("1/3,1/3,1/3");
    ASSERT_TRUE(v);
    EXPECT_EQ(v->size(), 3u);
    EXPECT_FALSE(parse_real_list("0.1,,0.9"));
    EXPECT_EQ(*parse_integer_list("4,40,6"), (std::vector<long long>{4, 40, 6}));
    EXPECT_FALSE(parse_integer_list("4,4.5"));
}

TEST(Parse, FormatRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 0.30489032772088, 123456789.0}) {
        EXPECT_EQ(*parse_decimal(format_double(v)), v);
    }
}
