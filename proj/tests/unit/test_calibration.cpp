#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracle.hpp"
#include "mnexact/calibration_simplex.hpp"

using namespace mnexact;

namespace {

std::vector<ForecastRecord> parse(const std::string& s) {
    std::istringstream is(s);
    return parse_forecasts(is);
}

std::size_t error_line(const std::string& s, ErrorCode expect) {
    try {
        parse(s);
    } catch (const LineError& e) {
        EXPECT_EQ(e.code(), expect);
        return e.line();
    }
    ADD_FAILURE() << "no error";
    return 0;
}

std::vector<ForecastRecord> repeated(std::vector<double> f, std::vector<int> outcome_counts) {
    std::vector<ForecastRecord> out;
    for (std::size_t j = 0; j < outcome_counts.size(); ++j)
        for (int k = 0; k < outcome_counts[j]; ++k) out.push_back(make_forecast(f, static_cast<int>(j + 1)));
    return out;
}

std::size_t count_of(const std::string& s, const std::string& what) {
    std::size_t n = 0;
    for (auto pos = s.find(what); pos != std::string::npos; pos = s.find(what, pos + 1)) ++n;
    return n;
}

} // namespace

TEST(ParseForecasts, Records) {
    const auto r = parse("p1,p2,p3,outcome\n0.5,0.3,0.2,1\n\n0.1, 0.1, 0.8 ,3\n");
    ASSERT_EQ(r.size(), 2u);
    EXPECT_DOUBLE_EQ(r[0].f[0], 0.5);
    EXPECT_EQ(r[0].outcome, 1);
    EXPECT_EQ(r[1].outcome, 3);
    EXPECT_TRUE(parse("p1,p2,p3,outcome\n").empty());
}

TEST(ParseForecasts, ErrorsCarryLineNumbers) {
    EXPECT_EQ(error_line("p1,p2,p3,outcome\n0.5,0.3,0.3,1\n", ErrorCode::ProbabilitySumError), 2u);
    EXPECT_EQ(error_line("p1,p2,p3,outcome\n0.5,0.3,0.2,1\n0.5,0.3,0.2,4\n", ErrorCode::OutcomeRange), 3u);
    EXPECT_EQ(error_line("p1,p2,p3,outcome\n0.5,0.3,0.2,0\n", ErrorCode::OutcomeRange), 2u);
    EXPECT_EQ(error_line("p1,p2,p3,outcome\n0.5,0.5,1\n", ErrorCode::MalformedLine), 2u);
    EXPECT_EQ(error_line("p1,p2,p3,outcome\n0.5,abc,0.2,1\n", ErrorCode::MalformedLine), 2u);
    EXPECT_EQ(error_line("p1,p2,p3,outcome\n1.2,-0.2,0.0,1\n", ErrorCode::ProbabilitySumError), 2u);
    EXPECT_EQ(error_line("a,b,c\n", ErrorCode::MalformedLine), 1u);
}

TEST(ParseForecasts, SumTolerance) {
    EXPECT_NO_THROW(parse("p1,p2,p3,outcome\n0.5,0.3,0.2000005,2\n"));
    EXPECT_THROW(parse("p1,p2,p3,outcome\n0.5,0.3,0.20001,2\n"), LineError);
}

TEST(HexGrid, Centers) {
    const HexGrid g(10);
    EXPECT_EQ(g.size(), 66u);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto c = g.center(i);
        EXPECT_NEAR(c[0] + c[1] + c[2], 1.0, 1e-15);
        EXPECT_EQ(g.assign(c), i);
    }
    EXPECT_THROW(HexGrid(0), Error);
}

TEST(HexGrid, NearestCenter) {
    const HexGrid g(10);
    const auto c = g.lattice(g.assign(std::vector<double>{0.52, 0.29, 0.19}));
    EXPECT_EQ(c, (std::array<int, 3>{5, 3, 2}));
    // equidistant from (5,2,3) and (5,3,2)
    const auto t = g.lattice(g.assign(std::vector<double>{0.5, 0.25, 0.25}));
    EXPECT_EQ(t, (std::array<int, 3>{5, 2, 3}));
}

TEST(HexGrid, AssignmentMatchesBruteForce) {
    const HexGrid g(10);
    for (int a = 0; a <= 40; ++a)
        for (int b = 0; a + b <= 40; ++b) {
            const std::vector<double> f{a / 40.0, b / 40.0, (40 - a - b) / 40.0};
            const auto got = g.center(g.assign(f));
            double best = 1e9;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const auto c = g.center(i);
                double d = 0;
                for (std::size_t j = 0; j < 3; ++j) d += (f[j] - c[j]) * (f[j] - c[j]);
                best = std::min(best, d);
            }
            double d = 0;
            for (std::size_t j = 0; j < 3; ++j) d += (f[j] - got[j]) * (f[j] - got[j]);
            EXPECT_NEAR(d, best, 1e-12);
        }
}

TEST(Colors, Classes) {
    EXPECT_EQ(color_class(0.5), ColorClass::Blue);
    EXPECT_EQ(color_class(0.1), ColorClass::Orange);
    EXPECT_EQ(color_class(0.05), ColorClass::Orange);
    EXPECT_EQ(color_class(0.01), ColorClass::Orange);
    EXPECT_EQ(color_class(0.0099), ColorClass::Red);
    EXPECT_EQ(color_class(1e-12), ColorClass::Red);
    EXPECT_EQ(color_class(0.0), ColorClass::Black);
    EXPECT_STREQ(color_name(ColorClass::Orange), "orange");
}

TEST(Summarize, UniformCellMatchesOracle) {
    const auto recs = repeated({1.0 / 3, 1.0 / 3, 1.0 / 3}, {4, 3, 3});
    const auto cells = summarize(recs, HexGrid(10));
    ASSERT_EQ(cells.size(), 1u);
    const auto& c = cells[0];
    EXPECT_EQ(c.count, 10);
    EXPECT_EQ(c.lattice, (std::array<int, 3>{3, 3, 4}));
    const double want = oracle::p_value({4, 3, 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, oracle::g_stat);
    EXPECT_NEAR(c.p_value, want, 1e-12);
    EXPECT_EQ(c.color, color_class(want));
}

TEST(Summarize, PerfectCalibration) {
    const auto cells = summarize(repeated({0.5, 0.3, 0.2}, {5, 3, 2}), HexGrid(10));
    ASSERT_EQ(cells.size(), 1u);
    EXPECT_NEAR(cells[0].statistic_value, 0.0, 1e-12);
    EXPECT_EQ(cells[0].p_value, 1.0);
    EXPECT_EQ(cells[0].color, ColorClass::Blue);
    for (double d : cells[0].displacement) EXPECT_NEAR(d, 0.0, 1e-15);
}

TEST(Summarize, ImpossibleOutcomeIsBlack) {
    auto recs = repeated({0.0, 0.6, 0.4}, {0, 6, 3});
    recs.push_back(make_forecast(std::vector<double>{0.0, 0.6, 0.4}, 1));
    const auto cells = summarize(recs, HexGrid(10));
    ASSERT_EQ(cells.size(), 1u);
    EXPECT_TRUE(cells[0].zero_probability_outcome);
    EXPECT_EQ(cells[0].p_value, 0.0);
    EXPECT_EQ(cells[0].color, ColorClass::Black);
}

TEST(Summarize, BelowThresholdIsRed) {
    const auto cells = summarize(repeated({0.5, 0.3, 0.2}, {0, 0, 30}), HexGrid(10));
    ASSERT_EQ(cells.size(), 1u);
    EXPECT_TRUE(cells[0].below_threshold);
    EXPECT_EQ(cells[0].p_value, 0.0);
    EXPECT_EQ(cells[0].color, ColorClass::Red);
}

TEST(Summarize, PartitionAndDisplacement) {
    SeededRng rng(61);
    std::vector<ForecastRecord> recs;
    for (int i = 0; i < 3000; ++i) {
        const auto f = sample_uniform_simplex(rng, 3);
        recs.push_back({f, static_cast<int>(sample_categorical(rng, f.entries())) + 1});
    }
    SummaryOptions opts;
    opts.min_count = 1;
    const HexGrid g(10);
    const auto cells = summarize(recs, g, opts);
    int total = 0;
    for (const auto& c : cells) {
        total += c.count;
        EXPECT_NEAR(c.displacement[0] + c.displacement[1] + c.displacement[2], 0.0, 1e-12);
        EXPECT_EQ(c.outcome_counts.total(), c.count);
    }
    EXPECT_EQ(total, 3000);
    opts.min_count = 50;
    for (const auto& c : summarize(recs, g, opts)) EXPECT_GE(c.count, 50);
}

TEST(Summarize, OptionErrors) {
    const auto recs = repeated({0.5, 0.3, 0.2}, {5, 3, 2});
    SummaryOptions o;
    o.theta = 0.05;
    EXPECT_THROW(summarize(recs, HexGrid(10), o), Error);
    o = {};
    o.min_count = 0;
    EXPECT_THROW(summarize(recs, HexGrid(10), o), Error);
}

TEST(Layout, CornersMapToVertices) {
    const SimplexLayout L;
    const auto v = L.vertices();
    for (std::size_t i = 0; i < 3; ++i) {
        std::vector<double> e(3, 0.0);
        e[i] = 1.0;
        const auto p = L.project(e);
        EXPECT_EQ(p.x, v[i].x);
        EXPECT_EQ(p.y, v[i].y);
    }
}

TEST(Render, EmptySummaries) {
    const HexGrid g(10);
    const std::vector<HexCellSummary> none;
    const std::string svg = render_svg(none, g);
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_EQ(count_of(svg, "<circle"), 0u);
    // 66 hexagons plus the clip path
    EXPECT_EQ(count_of(svg, "<polygon points="), 67u);
    const auto j = render_json(none, g);
    EXPECT_TRUE(j["cells"].is_array());
    EXPECT_TRUE(j["cells"].empty());
}

TEST(Render, DotAreaProportionalToCount) {
    EXPECT_NEAR(dot_radius(40, 40, 60, 0.9) / dot_radius(10, 40, 60, 0.9), 2.0, 1e-12);
    auto recs = repeated({0.5, 0.3, 0.2}, {5, 3, 2});
    const auto more = repeated({0.1, 0.1, 0.8}, {4, 4, 32});
    recs.insert(recs.end(), more.begin(), more.end());
    const auto cells = summarize(recs, HexGrid(10));
    ASSERT_EQ(cells.size(), 2u);
    const std::string svg = render_svg(cells, HexGrid(10));
    EXPECT_EQ(count_of(svg, "<circle"), 2u);
    EXPECT_NE(svg.find(color_hex(cells[0].color)), std::string::npos);
    const auto j = render_json(cells, HexGrid(10));
    ASSERT_EQ(j["cells"].size(), 2u);
    EXPECT_EQ(j["statistic"], "llr");
    EXPECT_EQ(j["cells"][0]["count"], 40);
    EXPECT_EQ(j["cells"][1]["count"], 10);
}
