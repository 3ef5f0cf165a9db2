#include "qtkz/length.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "qtkz/strings.hpp"

namespace qtkz {

double Length::to_units(double font_size) const {
    switch (unit) {
        case LengthUnit::Cm: return magnitude * kUnitsPerCm;
        case LengthUnit::Mm: return magnitude * kUnitsPerMm;
        case LengthUnit::Pt: return magnitude * kUnitsPerPt;
        case LengthUnit::Em: return magnitude * font_size;
    }
    return 0.0;
}

std::optional<Length> parse_length(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;

    std::size_t i = 0;
    if (text[i] == '+' || text[i] == '-') ++i;
    std::size_t digits_start = i;
    bool seen_digit = false;
    while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) {
        if (text[i] != '.') seen_digit = true;
        ++i;
    }
    if (!seen_digit) return std::nullopt;

    // from_chars rejects a leading '+' and a bare leading '.', so normalize.
    std::string number(text.substr(digits_start, i - digits_start));
    if (number.front() == '.') number.insert(number.begin(), '0');
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
    if (ec != std::errc() || ptr != number.data() + number.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    if (text[0] == '-') value = -value;

    auto unit_text = trim(text.substr(i));
    LengthUnit unit;
    if (unit_text == "cm") {
        unit = LengthUnit::Cm;
    } else if (unit_text == "mm") {
        unit = LengthUnit::Mm;
    } else if (unit_text == "pt") {
        unit = LengthUnit::Pt;
    } else if (unit_text == "em") {
        unit = LengthUnit::Em;
    } else {
        return std::nullopt;
    }
    return Length{value, unit};
}

std::string to_string(const Length &len) {
    const char *suffix = "pt";
    switch (len.unit) {
        case LengthUnit::Cm: suffix = "cm"; break;
        case LengthUnit::Mm: suffix = "mm"; break;
        case LengthUnit::Pt: suffix = "pt"; break;
        case LengthUnit::Em: suffix = "em"; break;
    }
    return fmt::format("{}{}", len.magnitude, suffix);
}

}  // namespace qtkz
