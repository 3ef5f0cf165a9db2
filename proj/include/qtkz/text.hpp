#pragma once

// Label text: a small subset of math markup turned into styled runs, and a
// deterministic width/height estimator in place of real font shaping.

#include <string>
#include <string_view>
#include <vector>

#include "qtkz/length.hpp"

namespace qtkz {

/// A piece of text at one size and baseline. `scale` multiplies the font
/// size; `rise` is the baseline offset in units of the base font size,
/// positive upwards.
struct StyledRun {
    std::string text;
    double scale = 1.0;
    double rise = 0.0;
    friend bool operator==(const StyledRun &, const StyledRun &) = default;
};

using TextLine = std::vector<StyledRun>;

struct FormattedText {
    std::vector<TextLine> lines;
    bool empty() const;
    /// All runs concatenated, lines joined by '\n'.
    std::string plain() const;
    friend bool operator==(const FormattedText &, const FormattedText &) = default;
};

/// `$...$` delimiters, `\text{}`, `{\sc ...}` and brace groups are stripped;
/// `\ket{x}` becomes |x⟩, `\bra{x}` ⟨x|; Greek letters and a few symbols map
/// to Unicode; `^`/`_` start scaled runs; `\\` and array rows break lines.
/// Unknown macros pass through verbatim.
FormattedText format_label(std::string_view raw);

struct TextMetrics {
    double advance = 0.52;      // per character, in font sizes
    double line_height = 1.2;   // in font sizes
    double script_scale = 0.7;  // sub/superscript size factor
    double font_size = kDefaultFontSize;

    /// Width of a plain string, counting UTF-8 code points.
    double width(std::string_view s, double scale = 1.0) const;
    double width(const FormattedText &t) const;
    double height(const FormattedText &t) const;
};

/// Number of UTF-8 code points.
std::size_t utf8_length(std::string_view s);

}  // namespace qtkz
