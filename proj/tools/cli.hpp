#pragma once

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mnexact/mnexact.hpp"

namespace mnexact::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kIo = 3, kData = 4 };

/// Raised inside subcommands; carries the exit code and the message.
struct Failure {
    int code;
    std::string message;
};

[[noreturn]] inline void fail_flag(const std::string& flag, const Error& e) {
    throw Failure{kUsage, flag + ": " + e.what()};
}

[[noreturn]] inline void fail_flag(const std::string& flag, const std::string& msg) {
    throw Failure{kUsage, flag + ": " + msg};
}

inline std::vector<StatisticKind> parse_stats(const std::string& s, const std::string& flag = "--stat") {
    if (s == "all") return standard_statistics();
    if (s == "prob-mass") return {StatisticKind::prob_mass()};
    if (s == "chisq") return {StatisticKind::chisq()};
    if (s == "llr") return {StatisticKind::llr()};
    if (s.rfind("pd:", 0) == 0) {
        const auto lambda = parse_real(std::string_view(s).substr(3));
        if (!lambda) fail_flag(flag, "cannot parse lambda in '" + s + "'");
        try {
            return {StatisticKind::power_divergence(*lambda)};
        } catch (const Error& e) {
            fail_flag(flag, e);
        }
    }
    fail_flag(flag, "expected prob-mass, chisq, llr, all or pd:<lambda>, got '" + s + "'");
}

inline StatisticKind parse_single_stat(const std::string& s, const std::string& flag = "--stat") {
    const auto v = parse_stats(s, flag);
    if (v.size() != 1) fail_flag(flag, "a single statistic is required");
    return v.front();
}

inline std::vector<double> parse_pi_flag(const std::string& s) {
    const auto v = parse_real_list(s);
    if (!v) fail_flag("--pi", "cannot parse '" + s + "' as comma-separated probabilities");
    return *v;
}

inline Hypothesis make_hypothesis(const std::vector<double>& pi, long long n, const std::string& n_flag) {
    if (n < 1) fail_flag(n_flag, "n must be positive");
    try {
        return validate_hypothesis(pi, n);
    } catch (const Error& e) {
        fail_flag(e.code() == ErrorCode::NonpositiveN ? n_flag : "--pi", e);
    }
}

inline nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

inline std::string text_number(double v) { return std::isfinite(v) ? format_double(v) : "inf"; }

/// p-values in text and CSV output; zero is written as 0.0.
inline std::string text_p(double p) { return p == 0.0 ? "0.0" : format_double(p); }

inline void write_json(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << '\n'; }

inline void check_theta(double theta) {
    if (!(theta >= kMinTheta && theta < 1.0)) fail_flag("--theta", "theta must lie in [1e-8, 1)");
}

inline void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) fail_flag("--alpha", "alpha must lie in (0, 1)");
}

// --- test -------------------------------------------------------------------

struct TestArgs {
    std::string pi, x, stat = "all", format = "text";
    double theta = kDefaultTheta;
};

inline int cmd_test(const TestArgs& a, std::ostream& out) {
    check_theta(a.theta);
    const auto pi = parse_pi_flag(a.pi);
    const auto xs = parse_integer_list(a.x);
    if (!xs) fail_flag("--x", "cannot parse '" + a.x + "' as comma-separated counts");
    long long n = 0;
    for (long long v : *xs) n += std::max(0LL, v);
    const Hypothesis hyp = make_hypothesis(pi, n, "--x");
    CountVector x = [&] {
        try {
            return validate_counts(*xs, hyp);
        } catch (const Error& e) {
            fail_flag("--x", e);
        }
    }();
    const auto stats = parse_stats(a.stat);
    const auto res = p_value_exact(x, hyp, a.theta, stats);

    if (a.format == "json") {
        nlohmann::json j;
        j["command"] = "test";
        j["n"] = hyp.n;
        j["pi"] = std::vector<double>(hyp.pi.entries().begin(), hyp.pi.entries().end());
        j["x"] = std::vector<int>(x.counts().begin(), x.counts().end());
        j["theta"] = a.theta;
        j["results"] = nlohmann::json::array();
        for (const auto& s : stats) {
            const TestResult& r = res.at(s);
            j["results"].push_back({{"statistic", s.name()},
                                    {"statistic_value", json_number(r.statistic_value)},
                                    {"exact_p", r.p_or_zero()},
                                    {"below_threshold", r.below_threshold},
                                    {"asymptotic_p", r.asymptotic_p},
                                    {"evaluations", r.evaluations}});
        }
        write_json(out, j);
    } else if (a.format == "csv") {
        out << "statistic,statistic_value,exact_p,below_threshold,asymptotic_p,evaluations\n";
        for (const auto& s : stats) {
            const TestResult& r = res.at(s);
            out << s.name() << ',' << text_number(r.statistic_value) << ',' << text_p(r.p_or_zero()) << ','
                << (r.below_threshold ? "true" : "false") << ',' << text_p(r.asymptotic_p) << ','
                << r.evaluations << '\n';
        }
    } else {
        for (const auto& s : stats) {
            const TestResult& r = res.at(s);
            out << s.name() << ": statistic " << text_number(r.statistic_value) << ", exact p "
                << text_p(r.p_or_zero());
            if (r.below_threshold) out << " (below threshold " << format_double(a.theta) << ")";
            out << ", asymptotic p " << text_p(r.asymptotic_p) << '\n';
        }
    }
    return kOk;
}

// --- region -----------------------------------------------------------------

struct RegionArgs {
    std::string pi, stat = "prob-mass", format = "text";
    long long n = 0;
    double alpha = 0.05;
    bool points = false;
};

inline int cmd_region(const RegionArgs& a, std::ostream& out) {
    check_alpha(a.alpha);
    const Hypothesis hyp = make_hypothesis(parse_pi_flag(a.pi), a.n, "--n");
    if (!hyp.pi.strictly_positive()) fail_flag("--pi", "acceptance regions need every entry > 0");
    const auto stats = parse_stats(a.stat);
    std::vector<AcceptanceRegion> regions;
    for (const auto& s : stats) regions.push_back(acceptance_region(hyp, a.alpha, s));

    if (a.format == "json") {
        nlohmann::json j;
        j["command"] = "region";
        j["n"] = hyp.n;
        j["alpha"] = a.alpha;
        j["regions"] = nlohmann::json::array();
        for (const auto& r : regions) {
            nlohmann::json o{{"statistic", r.statistic.name()}, {"count", r.points.size()},
                             {"threshold", r.threshold},        {"mass", r.mass},
                             {"test_size", r.test_size},        {"radius", r.radius},
                             {"evaluations", r.evaluations}};
            if (a.points) {
                o["points"] = nlohmann::json::array();
                for (const auto& p : r.points) o["points"].push_back(std::vector<int>(p.counts().begin(), p.counts().end()));
            }
            j["regions"].push_back(std::move(o));
        }
        write_json(out, j);
    } else if (a.format == "csv") {
        if (a.points) {
            out << "statistic";
            for (std::size_t k = 1; k <= hyp.categories(); ++k) out << ",x_" << k;
            out << '\n';
            for (const auto& r : regions)
                for (const auto& p : r.points) {
                    out << r.statistic.name();
                    for (int v : p.counts()) out << ',' << v;
                    out << '\n';
                }
        } else {
            out << "statistic,count,threshold,mass,test_size,radius,evaluations\n";
            for (const auto& r : regions)
                out << r.statistic.name() << ',' << r.points.size() << ',' << format_double(r.threshold) << ','
                    << format_double(r.mass) << ',' << format_double(r.test_size) << ',' << r.radius << ','
                    << r.evaluations << '\n';
        }
    } else {
        for (const auto& r : regions) {
            out << r.statistic.name() << ": " << r.points.size() << " points, threshold "
                << format_double(r.threshold) << ", mass " << format_double(r.mass) << ", test size "
                << format_double(r.test_size) << ", radius " << r.radius << '\n';
            if (a.points)
                for (const auto& p : r.points) {
                    out << "  ";
                    for (std::size_t k = 0; k < p.size(); ++k) out << (k ? "," : "") << p[k];
                    out << '\n';
                }
        }
    }
    return kOk;
}

// --- power ------------------------------------------------------------------

struct PowerArgs {
    std::string pi, stat = "prob-mass", format = "text";
    long long n = 0;
    double alpha = 0.05;
    long long axis = 1;
    int grid = 11;
};

inline int cmd_power(const PowerArgs& a, std::ostream& out) {
    check_alpha(a.alpha);
    const Hypothesis hyp = make_hypothesis(parse_pi_flag(a.pi), a.n, "--n");
    if (!hyp.pi.strictly_positive()) fail_flag("--pi", "power analysis needs every entry > 0");
    if (a.axis < 1 || a.axis > static_cast<long long>(hyp.categories()))
        fail_flag("--axis", "axis must lie in 1.." + std::to_string(hyp.categories()));
    if (a.grid < 2) fail_flag("--grid", "grid must have at least 2 points");
    const auto stats = parse_stats(a.stat);

    std::vector<double> qs;
    for (int k = 0; k < a.grid; ++k) qs.push_back(static_cast<double>(k) / (a.grid - 1));
    std::vector<RandomizedTest> tests;
    for (const auto& s : stats) tests.push_back(build_randomized_test(hyp, a.alpha, s));
    std::vector<std::vector<double>> powers(qs.size());
    for (std::size_t k = 0; k < qs.size(); ++k) {
        const auto alt = line_alternative(hyp.pi, static_cast<std::size_t>(a.axis), qs[k]);
        for (const auto& t : tests) powers[k].push_back(power(t, alt));
    }

    if (a.format == "json") {
        nlohmann::json j;
        j["command"] = "power";
        j["n"] = hyp.n;
        j["alpha"] = a.alpha;
        j["axis"] = a.axis;
        j["statistics"] = nlohmann::json::array();
        for (const auto& s : stats) j["statistics"].push_back(s.name());
        j["rows"] = nlohmann::json::array();
        for (std::size_t k = 0; k < qs.size(); ++k) j["rows"].push_back({{"q", qs[k]}, {"power", powers[k]}});
        write_json(out, j);
    } else {
        const char sep = a.format == "csv" ? ',' : ' ';
        out << 'q';
        for (const auto& s : stats) out << sep << s.name();
        out << '\n';
        for (std::size_t k = 0; k < qs.size(); ++k) {
            out << format_double(qs[k]);
            for (double p : powers[k]) out << sep << format_double(p);
            out << '\n';
        }
    }
    return kOk;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    StudyConfig config;
    long long pairs = 2000, n = 100, m = 5, oracle_subset = 0, mc_subset = 0, mc_samples = kDefaultMonteCarloSamples;
    long long group_size = 1000;
    std::string out, summary, format = "text";
    bool no_timings = false;
};

inline int cmd_simulate(SimulateArgs a, std::ostream& out) {
    if (a.pairs < 1) fail_flag("--pairs", "pairs must be >= 1");
    if (a.n < 1) fail_flag("--n", "n must be >= 1");
    if (a.m < 2) fail_flag("--m", "m must be >= 2");
    if (a.oracle_subset < 0) fail_flag("--oracle-subset", "must be nonnegative");
    if (a.mc_subset < 0) fail_flag("--mc-subset", "must be nonnegative");
    if (a.mc_samples < 1) fail_flag("--mc-samples", "must be >= 1");
    if (a.group_size < 1) fail_flag("--group-size", "must be >= 1");
    check_theta(a.config.theta);
    const auto narrow = [](long long v) { return static_cast<int>(std::min<long long>(v, 1'000'000'000)); };
    a.config.pairs = narrow(a.pairs);
    a.config.n = narrow(a.n);
    a.config.m = narrow(a.m);
    a.config.oracle_subset = narrow(a.oracle_subset);
    a.config.mc_subset = narrow(a.mc_subset);
    a.config.mc_samples = narrow(a.mc_samples);

    std::ofstream table(a.out);
    if (!table) throw Failure{kIo, "--out: cannot open '" + a.out + "' for writing"};
    const std::string summary_path = a.summary.empty() ? a.out + ".groups.jsonl" : a.summary;
    std::ofstream groups(summary_path);
    if (!groups) throw Failure{kIo, "--summary: cannot open '" + summary_path + "' for writing"};

    const auto records = run_study(a.config);
    write_study_csv(table, records, !a.no_timings);
    const auto summaries = group_summaries(records, static_cast<int>(a.group_size));
    write_group_summaries(groups, summaries);
    table.flush();
    groups.flush();
    if (!table || !groups) throw Failure{kIo, "write failed"};

    CompensatedSum alg_all, alg_oracle, full;
    std::size_t oracle_count = 0, below = 0;
    double max_oracle_diff = 0.0;
    for (const auto& r : records) {
        alg_all += static_cast<double>(r.rt_alg_ns);
        for (bool b : r.below) below += b ? 1 : 0;
        if (r.rt_full_ns) {
            ++oracle_count;
            alg_oracle += static_cast<double>(r.rt_alg_ns);
            full += static_cast<double>(*r.rt_full_ns);
            for (std::size_t k = 0; k < kStudyStatistics; ++k)
                if (r.exact_p[k]) max_oracle_diff = std::max(max_oracle_diff, std::abs(*r.exact_p[k] - *r.full_p[k]));
        }
    }
    const double mean_alg = alg_all.value() / static_cast<double>(records.size());
    nlohmann::json j;
    j["command"] = "simulate";
    j["records"] = records.size();
    j["groups"] = summaries.size();
    j["below_threshold"] = below;
    j["mean_algorithm_ns"] = mean_alg;
    j["table"] = a.out;
    j["summary"] = summary_path;
    if (oracle_count > 0) {
        const double mean_alg_o = alg_oracle.value() / static_cast<double>(oracle_count);
        const double mean_full = full.value() / static_cast<double>(oracle_count);
        j["oracle"] = {{"records", oracle_count},
                       {"max_abs_difference", max_oracle_diff},
                       {"mean_algorithm_ns", mean_alg_o},
                       {"mean_full_enumeration_ns", mean_full},
                       {"speedup", mean_alg_o > 0 ? mean_full / mean_alg_o : 0.0}};
    }
    if (a.format == "json") {
        write_json(out, j);
    } else {
        out << "records " << records.size() << ", groups " << summaries.size() << ", below threshold " << below
            << '\n'
            << "mean algorithm runtime " << format_double(mean_alg / 1e6) << " ms\n";
        if (oracle_count > 0) {
            out << "oracle records " << oracle_count << ", max |exact - full| "
                << format_double(max_oracle_diff) << '\n'
                << "mean full enumeration runtime " << format_double(j["oracle"]["mean_full_enumeration_ns"].get<double>() / 1e6)
                << " ms, speedup " << format_double(j["oracle"]["speedup"].get<double>()) << "x\n";
        }
    }
    return kOk;
}

// --- bench ------------------------------------------------------------------

struct BenchArgs {
    long long n = 100, m = 5, runs = 20;
    double theta = kDefaultTheta;
    std::string stat = "prob-mass", format = "text";
};

/// Times the exact test against full enumeration at the point nearest to
/// n * pi for the uniform null.
inline int cmd_bench(const BenchArgs& a, std::ostream& out) {
    if (a.n < 1) fail_flag("--n", "n must be >= 1");
    if (a.m < 2) fail_flag("--m", "m must be >= 2");
    if (a.runs < 1) fail_flag("--runs", "runs must be >= 1");
    check_theta(a.theta);
    const StatisticKind stat = parse_single_stat(a.stat);
    const Hypothesis hyp = make_hypothesis(std::vector<double>(static_cast<std::size_t>(a.m), 1.0 / static_cast<double>(a.m)), a.n, "--n");
    const CountVector x = nearest_lattice_point(hyp);
    double alg = 0.0, fullt = 0.0;
    double p_alg = 0.0, p_full = 0.0;
    for (long long r = 0; r < a.runs; ++r) {
        alg += static_cast<double>(detail::time_ns([&] { p_alg = p_value_exact(x, hyp, a.theta, stat).p_or_zero(); }));
        fullt += static_cast<double>(detail::time_ns([&] { p_full = p_value_full_enum(x, hyp, stat); }));
    }
    alg /= static_cast<double>(a.runs);
    fullt /= static_cast<double>(a.runs);
    if (a.format == "json") {
        write_json(out, {{"command", "bench"},
                         {"n", a.n},
                         {"m", a.m},
                         {"runs", a.runs},
                         {"statistic", stat.name()},
                         {"exact_p", p_alg},
                         {"full_p", p_full},
                         {"mean_algorithm_ns", alg},
                         {"mean_full_enumeration_ns", fullt},
                         {"speedup", alg > 0 ? fullt / alg : 0.0}});
    } else {
        out << "algorithm " << format_double(alg / 1e6) << " ms, full enumeration " << format_double(fullt / 1e6)
            << " ms, speedup " << format_double(alg > 0 ? fullt / alg : 0.0) << "x\n";
    }
    return kOk;
}

// --- calsim -----------------------------------------------------------------

struct CalsimArgs {
    std::string input, svg, json, stat = "llr", format = "text";
    int resolution = 10, min_count = 10;
    double theta = kDefaultTheta, scale = 1.0;
};

inline int cmd_calsim(const CalsimArgs& a, std::ostream& out) {
    if (a.resolution < 1) fail_flag("--resolution", "resolution must be positive");
    if (a.min_count < 1) fail_flag("--min-count", "min-count must be positive");
    if (!(a.theta >= kMinTheta && a.theta <= 0.01)) fail_flag("--theta", "theta must lie in [1e-8, 0.01]");
    if (!std::isfinite(a.scale)) fail_flag("--scale", "scale must be finite");
    SummaryOptions opts;
    opts.min_count = a.min_count;
    opts.theta = a.theta;
    opts.scale = a.scale;
    opts.stat = parse_single_stat(a.stat);

    std::ifstream in(a.input);
    if (!in) throw Failure{kIo, "--input: cannot open '" + a.input + "'"};
    std::vector<ForecastRecord> records;
    try {
        records = parse_forecasts(in);
    } catch (const LineError& e) {
        throw Failure{kData, a.input + ": " + e.what()};
    }
    const HexGrid grid(a.resolution);
    const auto cells = summarize(records, grid, opts);
    const auto doc = render_json(cells, grid, opts);

    if (!a.svg.empty()) {
        std::ofstream f(a.svg);
        if (!f) throw Failure{kIo, "--svg: cannot open '" + a.svg + "' for writing"};
        f << render_svg(cells, grid);
        if (!f) throw Failure{kIo, "--svg: write failed"};
    }
    if (!a.json.empty()) {
        std::ofstream f(a.json);
        if (!f) throw Failure{kIo, "--json: cannot open '" + a.json + "' for writing"};
        f << doc.dump(2) << '\n';
        if (!f) throw Failure{kIo, "--json: write failed"};
    }
    std::map<std::string, int> classes{{"blue", 0}, {"orange", 0}, {"red", 0}, {"black", 0}};
    for (const auto& c : cells) ++classes[color_name(c.color)];
    if (a.format == "json") {
        nlohmann::json j = doc;
        j["command"] = "calsim";
        j["records"] = records.size();
        j["classes"] = classes;
        write_json(out, j);
    } else if (a.format == "csv") {
        out << "i,j,k,count,f1,f2,f3,o1,o2,o3,p_value,below_threshold,color\n";
        for (const auto& c : cells) {
            out << c.lattice[0] << ',' << c.lattice[1] << ',' << c.lattice[2] << ',' << c.count;
            for (double f : c.mean_forecast.entries()) out << ',' << format_double(f);
            for (int o : c.outcome_counts.counts()) out << ',' << o;
            out << ',' << text_p(c.p_value) << ',' << (c.below_threshold ? "true" : "false") << ','
                << color_name(c.color) << '\n';
        }
    } else {
        out << records.size() << " forecasts, " << cells.size() << " cells shown";
        for (const auto& [k, v] : classes) out << ", " << k << ' ' << v;
        out << '\n';
    }
    return kOk;
}

// --- dispatcher -------------------------------------------------------------

inline void add_format(CLI::App* sub, std::string& f) {
    sub->add_option("--format", f, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
}

/// Parses argv and runs one subcommand. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact multinomial goodness-of-fit tests", "mnexact"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    TestArgs ta;
    auto* test = app.add_subcommand("test", "Exact, asymptotic p-values for one observation");
    test->add_option("--pi", ta.pi, "Null probabilities, comma separated (fractions allowed)")->required();
    test->add_option("--x", ta.x, "Observed counts, comma separated")->required();
    test->add_option("--theta", ta.theta, "Smallest p-value computed exactly");
    test->add_option("--stat", ta.stat, "prob-mass, chisq, llr, all or pd:<lambda>");
    add_format(test, ta.format);

    RegionArgs ra;
    auto* region = app.add_subcommand("region", "Acceptance region of level alpha");
    region->add_option("--pi", ra.pi, "Null probabilities")->required();
    region->add_option("--n", ra.n, "Sample size")->required();
    region->add_option("--alpha", ra.alpha, "Level");
    region->add_option("--stat", ra.stat, "Statistic");
    region->add_flag("--points", ra.points, "List the points of the region");
    add_format(region, ra.format);

    PowerArgs pa;
    auto* pw = app.add_subcommand("power", "Power of the randomized test along a line through pi");
    pw->add_option("--pi", pa.pi, "Null probabilities")->required();
    pw->add_option("--n", pa.n, "Sample size")->required();
    pw->add_option("--alpha", pa.alpha, "Size");
    pw->add_option("--stat", pa.stat, "Statistic");
    pw->add_option("--axis", pa.axis, "Coordinate varied, 1-based");
    pw->add_option("--grid", pa.grid, "Number of equally spaced q values in [0, 1]");
    add_format(pw, pa.format);

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Simulation study over random null hypotheses");
    sim->add_option("--pairs", sa.pairs, "Number of (pi, x) pairs");
    sim->add_option("--n", sa.n, "Sample size");
    sim->add_option("--m", sa.m, "Number of categories");
    sim->add_option("--theta", sa.config.theta, "Threshold");
    sim->add_option("--seed", sa.config.seed, "Seed");
    sim->add_option("--oracle-subset", sa.oracle_subset, "Records also checked by full enumeration");
    sim->add_option("--mc-subset", sa.mc_subset, "Records also estimated by Monte Carlo");
    sim->add_option("--mc-samples", sa.mc_samples, "Monte Carlo samples per record");
    sim->add_option("--group-size", sa.group_size, "Records per summary group");
    sim->add_option("--out", sa.out, "Record table (CSV)")->required();
    sim->add_option("--summary", sa.summary, "Group summaries (JSON Lines); default <out>.groups.jsonl");
    sim->add_flag("--no-timings", sa.no_timings, "Leave runtime columns empty");
    add_format(sim, sa.format);

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "Time the exact test against full enumeration");
    bench->add_option("--n", ba.n, "Sample size");
    bench->add_option("--m", ba.m, "Number of categories (uniform null)");
    bench->add_option("--runs", ba.runs, "Repetitions");
    bench->add_option("--theta", ba.theta, "Threshold");
    bench->add_option("--stat", ba.stat, "Statistic");
    add_format(bench, ba.format);

    CalsimArgs ca;
    auto* cal = app.add_subcommand("calsim", "Calibration simplex for ternary forecasts");
    cal->add_option("--input", ca.input, "CSV with header p1,p2,p3,outcome")->required();
    cal->add_option("--resolution", ca.resolution, "Grid resolution h");
    cal->add_option("--min-count", ca.min_count, "Smallest cell shown");
    cal->add_option("--theta", ca.theta, "Threshold");
    cal->add_option("--stat", ca.stat, "Statistic");
    cal->add_option("--scale", ca.scale, "Displacement scale");
    cal->add_option("--svg", ca.svg, "SVG output path");
    cal->add_option("--json", ca.json, "JSON output path");
    add_format(cal, ca.format);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        // help and version requests; the help text follows the subcommand
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (test->parsed()) return cmd_test(ta, out);
        if (region->parsed()) return cmd_region(ra, out);
        if (pw->parsed()) return cmd_power(pa, out);
        if (sim->parsed()) return cmd_simulate(sa, out);
        if (bench->parsed()) return cmd_bench(ba, out);
        if (cal->parsed()) return cmd_calsim(ca, out);
    } catch (const Failure& f) {
        err << "error: " << f.message << '\n';
        return f.code;
    } catch (const LineError& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

} // namespace mnexact::cli
