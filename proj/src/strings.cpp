#include "qtkz/strings.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

namespace qtkz {

std::string_view strip_outer_braces(std::string_view s) {
    s = trim(s);
    if (s.size() < 2 || s.front() != '{' || s.back() != '}') return s;
    // Make sure the first brace closes at the very end, not e.g. `{a}{b}`.
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\') {
            ++i;
            continue;
        }
        if (s[i] == '{') ++depth;
        if (s[i] == '}') {
            --depth;
            if (depth == 0 && i + 1 != s.size()) return s;
        }
    }
    return trim(s.substr(1, s.size() - 2));
}

std::optional<int> parse_int(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

std::optional<double> parse_real(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    std::string buf(s);
    bool negative = false;
    if (buf.front() == '-') {
        negative = true;
        buf.erase(buf.begin());
    }
    if (!buf.empty() && buf.front() == '.') buf.insert(buf.begin(), '0');
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc() || ptr != buf.data() + buf.size() || !std::isfinite(value)) return std::nullopt;
    return negative ? -value : value;
}

std::string format_number(double v) {
    if (!std::isfinite(v) || v == 0.0) return "0";
    int exponent = static_cast<int>(std::floor(std::log10(std::fabs(v))));
    int decimals = 5 - exponent;
    if (decimals < 0) {
        double scale = std::pow(10.0, -decimals);
        v = std::round(v / scale) * scale;
        decimals = 0;
    }
    std::string s = fmt::format("{:.{}f}", v, decimals);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") return "0";
    return s;
}

}  // namespace qtkz
