#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace mnexact {

inline std::string_view trim(std::string_view s) noexcept {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_decimal(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

/// A decimal number or a fraction "a/b" of decimals, divided once.
inline std::optional<double> parse_real(std::string_view s) {
    s = trim(s);
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const auto num = parse_decimal(s.substr(0, slash));
        const auto den = parse_decimal(s.substr(slash + 1));
        if (!num || !den || *den == 0.0) return std::nullopt;
        return *num / *den;
    }
    return parse_decimal(s);
}

inline std::optional<long long> parse_integer(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<std::vector<double>> parse_real_list(std::string_view s) {
    std::vector<double> out;
    for (auto part : split(s, ',')) {
        auto v = parse_real(part);
        if (!v) return std::nullopt;
        out.push_back(*v);
    }
    return out;
}

inline std::optional<std::vector<long long>> parse_integer_list(std::string_view s) {
    std::vector<long long> out;
    for (auto part : split(s, ',')) {
        auto v = parse_integer(part);
        if (!v) return std::nullopt;
        out.push_back(*v);
    }
    return out;
}

/// Shortest round-trip representation of a double.
inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

} // namespace mnexact
