#pragma once

#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "mnexact/core_types.hpp"
#include "mnexact/error.hpp"
#include "mnexact/exact_test.hpp"
#include "mnexact/lattice.hpp"
#include "mnexact/montecarlo.hpp"
#include "mnexact/parse.hpp"

namespace mnexact {

/// Forecasts whose entries sum within this of one are accepted and
/// renormalized.
inline constexpr double kForecastSumTolerance = 1e-6;

struct ForecastRecord {
    ProbabilityVector f;
    int outcome;  // 1, 2 or 3
};

inline ForecastRecord make_forecast(std::span<const double> f, int outcome, std::size_t line = 0) {
    if (f.size() != 3) throw LineError(ErrorCode::MalformedLine, line, "expected 3 probabilities");
    if (outcome < 1 || outcome > 3)
        throw LineError(ErrorCode::OutcomeRange, line, "outcome must be 1, 2 or 3");
    try {
        return ForecastRecord{ProbabilityVector::make(f, kForecastSumTolerance), outcome};
    } catch (const Error& e) {
        throw LineError(ErrorCode::ProbabilitySumError, line, e.detail());
    }
}

/// Reads "p1,p2,p3,outcome" text. Blank lines are skipped; errors carry
/// 1-based line numbers.
inline std::vector<ForecastRecord> parse_forecasts(std::istream& in) {
    std::vector<ForecastRecord> out;
    std::string raw;
    std::size_t line = 0;
    bool header = false;
    while (std::getline(in, raw)) {
        ++line;
        const std::string_view s = trim(raw);
        if (s.empty()) continue;
        const auto fields = split(s, ',');
        if (!header) {
            if (fields.size() != 4 || fields[0] != "p1" || fields[1] != "p2" || fields[2] != "p3" ||
                fields[3] != "outcome")
                throw LineError(ErrorCode::MalformedLine, line, "expected header p1,p2,p3,outcome");
            header = true;
            continue;
        }
        if (fields.size() != 4) throw LineError(ErrorCode::MalformedLine, line, "expected 4 fields");
        std::array<double, 3> f{};
        for (std::size_t j = 0; j < 3; ++j) {
            const auto v = parse_decimal(fields[j]);
            if (!v) throw LineError(ErrorCode::MalformedLine, line, "cannot parse probability");
            f[j] = *v;
        }
        const auto o = parse_integer(fields[3]);
        if (!o) throw LineError(ErrorCode::MalformedLine, line, "cannot parse outcome");
        if (*o < 1 || *o > 3) throw LineError(ErrorCode::OutcomeRange, line, "outcome must be 1, 2 or 3");
        out.push_back(make_forecast(f, static_cast<int>(*o), line));
    }
    if (!header) throw LineError(ErrorCode::MalformedLine, line, "missing header p1,p2,p3,outcome");
    return out;
}

/// Centers (i, j, k) / h with i + j + k = h, in lexicographic order.
class HexGrid {
public:
    explicit HexGrid(int resolution = 10) : h_(resolution) {
        if (resolution < 1) throw Error(ErrorCode::InvalidConfig, "resolution must be positive");
        enumerate_full(h_, 3, [&](std::span<const int> z) { lattice_.push_back({z[0], z[1], z[2]}); });
    }

    int resolution() const noexcept { return h_; }
    std::size_t size() const noexcept { return lattice_.size(); }
    const std::array<int, 3>& lattice(std::size_t i) const { return lattice_[i]; }
    std::array<double, 3> center(std::size_t i) const {
        const auto& c = lattice_[i];
        return {static_cast<double>(c[0]) / h_, static_cast<double>(c[1]) / h_, static_cast<double>(c[2]) / h_};
    }

    /// Nearest center in barycentric Euclidean distance; the first center
    /// in lexicographic order wins ties.
    std::size_t assign(std::span<const double> f) const {
        std::size_t best = 0;
        double best_d = kInf;
        for (std::size_t i = 0; i < lattice_.size(); ++i) {
            const auto c = center(i);
            double d = 0.0;
            for (std::size_t j = 0; j < 3; ++j) d += (f[j] - c[j]) * (f[j] - c[j]);
            if (d < best_d - kTieTolerance) {
                best_d = d;
                best = i;
            }
        }
        return best;
    }
    std::size_t assign(const ForecastRecord& r) const { return assign(r.f.entries()); }

    /// Squared distances this close count as ties.
    static constexpr double kTieTolerance = 1e-12;

private:
    int h_;
    std::vector<std::array<int, 3>> lattice_;
};

enum class ColorClass { Blue, Orange, Red, Black };

inline ColorClass color_class(double p) {
    if (p > 0.1) return ColorClass::Blue;
    if (p >= 0.01) return ColorClass::Orange;
    if (p > 0.0) return ColorClass::Red;
    return ColorClass::Black;
}

inline const char* color_name(ColorClass c) {
    switch (c) {
    case ColorClass::Blue: return "blue";
    case ColorClass::Orange: return "orange";
    case ColorClass::Red: return "red";
    case ColorClass::Black: return "black";
    }
    return "black";
}

inline const char* color_hex(ColorClass c) {
    switch (c) {
    case ColorClass::Blue: return "#1f77b4";
    case ColorClass::Orange: return "#ff7f0e";
    case ColorClass::Red: return "#d62728";
    case ColorClass::Black: return "#000000";
    }
    return "#000000";
}

struct HexCellSummary {
    std::size_t cell = 0;
    std::array<int, 3> lattice{};
    std::array<double, 3> center{};
    int count = 0;
    ProbabilityVector mean_forecast;
    CountVector outcome_counts;
    std::array<double, 3> displacement{};
    double statistic_value = 0.0;
    /// 0 when the exact p-value is below theta or an outcome of forecast
    /// probability zero occurred.
    double p_value = 1.0;
    bool below_threshold = false;
    bool zero_probability_outcome = false;
    ColorClass color = ColorClass::Blue;
};

struct SummaryOptions {
    int min_count = 10;
    double theta = kDefaultTheta;
    double scale = 1.0;
    StatisticKind stat = StatisticKind::llr();
};

/// Per-cell aggregates and exact p-values for cells with at least
/// `min_count` forecasts, in lexicographic center order.
inline std::vector<HexCellSummary> summarize(std::span<const ForecastRecord> records, const HexGrid& grid,
                                             const SummaryOptions& opts = {}) {
    if (opts.min_count < 1) throw Error(ErrorCode::InvalidConfig, "min_count must be positive");
    if (!(opts.theta >= kMinTheta && opts.theta <= 0.01))
        throw Error(ErrorCode::ThetaOutOfRange, "theta must lie in [1e-8, 0.01] for color classes");
    std::vector<std::vector<const ForecastRecord*>> cells(grid.size());
    for (const auto& r : records) cells[grid.assign(r)].push_back(&r);

    std::vector<HexCellSummary> out;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const auto& members = cells[c];
        if (members.empty() || static_cast<int>(members.size()) < opts.min_count) continue;
        std::vector<ProbabilityVector> fs;
        std::vector<int> counts(3, 0);
        for (const auto* r : members) {
            fs.push_back(r->f);
            ++counts[static_cast<std::size_t>(r->outcome - 1)];
        }
        const int ng = static_cast<int>(members.size());
        HexCellSummary s{c,
                         grid.lattice(c),
                         grid.center(c),
                         ng,
                         mean_forecast(fs),
                         CountVector::from_trusted(counts),
                         {},
                         0.0,
                         1.0,
                         false,
                         false,
                         ColorClass::Blue};
        for (std::size_t j = 0; j < 3; ++j) {
            s.displacement[j] = opts.scale * (static_cast<double>(counts[j]) / ng - s.mean_forecast[j]);
            if (s.mean_forecast[j] == 0.0 && counts[j] > 0) s.zero_probability_outcome = true;
        }
        const Hypothesis hyp{ng, s.mean_forecast};
        if (s.zero_probability_outcome) {
            s.statistic_value = kInf;
            s.p_value = 0.0;
        } else {
            const TestResult r = p_value_exact(s.outcome_counts, hyp, opts.theta, opts.stat);
            s.statistic_value = r.statistic_value;
            s.below_threshold = r.below_threshold;
            s.p_value = r.p_or_zero();
        }
        // below threshold means 0 < p < theta <= 0.01
        s.color = s.below_threshold ? ColorClass::Red : color_class(s.p_value);
        out.push_back(std::move(s));
    }
    return out;
}

struct PlanePoint {
    double x;
    double y;
};

/// Equilateral triangle layout: outcome 1 bottom left, 2 bottom right,
/// 3 on top.
struct SimplexLayout {
    double side = 600.0;
    double margin = 40.0;

    std::array<PlanePoint, 3> vertices() const {
        const double height = side * std::sqrt(3.0) / 2.0;
        return {PlanePoint{margin, margin + height}, PlanePoint{margin + side, margin + height},
                PlanePoint{margin + side / 2.0, margin}};
    }
    double width() const { return side + 2.0 * margin; }
    double height() const { return side * std::sqrt(3.0) / 2.0 + 2.0 * margin; }

    PlanePoint project(std::span<const double> b) const {
        const auto v = vertices();
        PlanePoint p{0.0, 0.0};
        for (std::size_t i = 0; i < 3; ++i) {
            p.x += b[i] * v[i].x;
            p.y += b[i] * v[i].y;
        }
        return p;
    }
};

struct RenderOptions {
    SimplexLayout layout;
    /// Largest dot radius as a fraction of the hexagon inradius.
    double max_dot_fraction = 0.9;
};

/// Dot radius for a cell of `count` forecasts; area is proportional to
/// count and the largest cell gets the largest dot.
inline double dot_radius(int count, int max_count, double cell_spacing, double max_fraction) {
    if (max_count <= 0) return 0.0;
    return max_fraction * cell_spacing / 2.0 * std::sqrt(static_cast<double>(count) / max_count);
}

inline std::string render_svg(std::span<const HexCellSummary> cells, const HexGrid& grid,
                              const RenderOptions& opts = {}) {
    const SimplexLayout& L = opts.layout;
    const double spacing = L.side / grid.resolution();
    const double circumradius = spacing / std::sqrt(3.0);
    const double pi = std::acos(-1.0);
    const auto v = L.vertices();

    std::ostringstream os;
    os.precision(10);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << L.width() << "\" height=\""
       << L.height() << "\" viewBox=\"0 0 " << L.width() << ' ' << L.height() << "\">\n";
    os << "<defs><clipPath id=\"simplex\"><polygon points=\"";
    for (const auto& p : v) os << p.x << ',' << p.y << ' ';
    os << "\"/></clipPath></defs>\n";
    os << "<g id=\"grid\" clip-path=\"url(#simplex)\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"1\">\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto c = L.project(grid.center(i));
        os << "<polygon points=\"";
        for (int k = 0; k < 6; ++k) {
            const double a = pi / 6.0 + k * pi / 3.0;
            os << c.x + circumradius * std::cos(a) << ',' << c.y - circumradius * std::sin(a) << ' ';
        }
        os << "\"/>\n";
    }
    os << "</g>\n<polygon id=\"outline\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : v) os << p.x << ',' << p.y << ' ';
    os << "\"/>\n";

    int max_count = 0;
    for (const auto& c : cells) max_count = std::max(max_count, c.count);
    os << "<g id=\"cells\">\n";
    for (const auto& c : cells) {
        std::array<double, 3> shifted{};
        for (std::size_t j = 0; j < 3; ++j) shifted[j] = c.center[j] + c.displacement[j];
        const auto p = L.project(shifted);
        os << "<circle cx=\"" << p.x << "\" cy=\"" << p.y << "\" r=\""
           << dot_radius(c.count, max_count, spacing, opts.max_dot_fraction) << "\" fill=\""
           << color_hex(c.color) << "\"/>\n";
    }
    os << "</g>\n";
    const char* labels[] = {"1", "2", "3"};
    const double offsets[][2] = {{-12.0, 16.0}, {6.0, 16.0}, {-4.0, -8.0}};
    for (std::size_t i = 0; i < 3; ++i)
        os << "<text x=\"" << v[i].x + offsets[i][0] << "\" y=\"" << v[i].y + offsets[i][1]
           << "\" font-family=\"sans-serif\" font-size=\"14\">" << labels[i] << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

inline nlohmann::json cell_to_json(const HexCellSummary& c) {
    nlohmann::json j;
    j["lattice"] = c.lattice;
    j["center"] = c.center;
    j["count"] = c.count;
    j["mean_forecast"] = std::vector<double>(c.mean_forecast.entries().begin(), c.mean_forecast.entries().end());
    j["outcome_counts"] = std::vector<int>(c.outcome_counts.counts().begin(), c.outcome_counts.counts().end());
    j["displacement"] = c.displacement;
    j["statistic_value"] = std::isinf(c.statistic_value) ? nlohmann::json(nullptr) : nlohmann::json(c.statistic_value);
    j["p_value"] = c.p_value;
    j["below_threshold"] = c.below_threshold;
    j["zero_probability_outcome"] = c.zero_probability_outcome;
    j["color_class"] = color_name(c.color);
    j["color"] = color_hex(c.color);
    return j;
}

inline nlohmann::json render_json(std::span<const HexCellSummary> cells, const HexGrid& grid,
                                  const SummaryOptions& opts = {}) {
    nlohmann::json j;
    j["grid"] = {{"resolution", grid.resolution()}, {"centers", grid.size()}};
    j["min_count"] = opts.min_count;
    j["theta"] = opts.theta;
    j["scale"] = opts.scale;
    j["statistic"] = opts.stat.name();
    j["cells"] = nlohmann::json::array();
    for (const auto& c : cells) j["cells"].push_back(cell_to_json(c));
    return j;
}

} // namespace mnexact
