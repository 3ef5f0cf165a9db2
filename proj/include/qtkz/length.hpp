#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace qtkz {

/// Internal drawing units: 1cm = 100u.
inline constexpr double kUnitsPerCm = 100.0;
inline constexpr double kUnitsPerMm = 10.0;
inline constexpr double kUnitsPerPt = 100.0 / 28.4526;
/// Default font size (10pt) in internal units.
inline constexpr double kDefaultFontSize = 10.0 * kUnitsPerPt;

enum class LengthUnit { Cm, Mm, Pt, Em };

struct Length {
    double magnitude = 0.0;
    LengthUnit unit = LengthUnit::Pt;

    /// Converts to internal units; `em` resolves against `font_size` (itself in units).
    double to_units(double font_size = kDefaultFontSize) const;

    static Length cm(double v) { return {v, LengthUnit::Cm}; }
    static Length mm(double v) { return {v, LengthUnit::Mm}; }
    static Length pt(double v) { return {v, LengthUnit::Pt}; }
    static Length em(double v) { return {v, LengthUnit::Em}; }

    friend bool operator==(const Length &, const Length &) = default;
};

/// Parses `2mm`, `-0.3cm`, `.7em`, `6 pt`. Returns nullopt on anything else,
/// including a missing unit or a non-finite magnitude.
std::optional<Length> parse_length(std::string_view text);

std::string to_string(const Length &len);

}  // namespace qtkz
