#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace qtkz {

inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_letter(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

/// Strips one pair of enclosing braces when they match each other.
std::string_view strip_outer_braces(std::string_view s);

/// Strict decimal integer (optional sign), no trailing garbage.
std::optional<int> parse_int(std::string_view s);

/// Strict finite real number, no unit.
std::optional<double> parse_real(std::string_view s);

/// Number formatting shared by the SVG and JSON emitters: at most six
/// significant digits, fixed notation, no trailing zeros, no negative zero.
std::string format_number(double v);

}  // namespace qtkz
