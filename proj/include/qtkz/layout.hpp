#pragma once

// Grid geometry: element sizes, column and row placement, slices, groups
// and the diagram baseline. All values are internal units, y grows downward
// and row 0 sits at y = 0.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "qtkz/model.hpp"
#include "qtkz/style.hpp"
#include "qtkz/text.hpp"

namespace qtkz {

struct GeometryConfig {
    double column_sep = 0.5 * kUnitsPerCm;
    double row_sep = 0.25 * kUnitsPerCm;
    bool between_origins = false;
    TextMetrics metrics;

    /// Defaults overridden by `column sep` / `row sep` from the environment.
    static GeometryConfig from_env(const EnvOptions &env);
};

/// Fixed glyph dimensions.
struct GlyphTable {
    static constexpr double kDotRadiusPt = 2.2;
    static constexpr double kTargRadiusPt = 5.0;
    static constexpr double kCrossHalfPt = 4.5;
    static constexpr double kStrikeHeightCm = 0.2;
    static constexpr double kStrikeWidthCm = 0.15;
    static constexpr double kClassicalOffsetCm = 0.05;
    static constexpr double kAlternateSpacingCm = 0.05;
    static constexpr double kMeterAspect = 1.3;
    static constexpr double kMeterArcSweepDeg = 140.0;
    static constexpr double kMeterNeedleDeg = 65.0;
    static constexpr double kMeterDDepth = 0.6;
    static constexpr double kBraceWidthPt = 5.0;
    static constexpr double kArrowHeadPt = 4.0;
    static constexpr double kTrashArrowPt = 8.0;
    static constexpr double kBundleTickPt = 4.0;

    static double pt(double v) { return v * kUnitsPerPt; }
    static double cm(double v) { return v * kUnitsPerCm; }
};

struct Size {
    double w = 0.0;
    double h = 0.0;
    friend bool operator==(const Size &, const Size &) = default;
};

/// Axis-aligned box; (x, y) is the top-left corner.
struct Box {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;
    double cx() const { return x + w / 2; }
    double cy() const { return y + h / 2; }
    double right() const { return x + w; }
    double bottom() const { return y + h; }
    friend bool operator==(const Box &, const Box &) = default;
};

/// Intrinsic size of an element on one row. Gates report the height they
/// need per spanned row; sticks report zero height (labels do not take part
/// in row spacing); ghosts report zero width.
Size measure(const Element &element, const NodeStyle &style, const TextMetrics &metrics);

/// Height of a single-row gate labelled "U" with default style: the floor
/// every row is given.
double default_row_height(const TextMetrics &metrics);

/// `col_x[0] = w[0]/2`, then each centre follows the previous one by the
/// two half widths, the separation and the per-gap extra.
std::vector<double> place_columns(const std::vector<double> &widths, const GeometryConfig &config,
                                  const std::map<int, Length> &extra = {});

struct RowPlacement {
    std::vector<double> row_y;
    /// Gaps (between rows i and i+1) whose between-origins pitch is smaller
    /// than the adjacent half heights.
    std::vector<int> pitch_too_small;
};

RowPlacement place_rows(const std::vector<double> &heights, const GeometryConfig &config,
                        const std::map<int, Length> &extra = {});

/// Absent: midpoint of first and last rows. Integer k: row k (1-based).
/// Fractional: linear interpolation. Throws Error{OutOfRangeAlign}.
double baseline(const std::vector<double> &row_y, std::optional<double> align_equals_at);

struct LayoutResult {
    std::vector<double> col_x;
    std::vector<double> col_w;
    std::vector<double> row_y;
    std::vector<double> row_h;
    /// Boxes of primary elements with a visible extent, keyed (row, col).
    std::map<std::pair<int, int>, Box> boxes;
    double baseline_y = 0.0;
    std::vector<double> slice_x;  // parallel to ResolvedCircuit::slices
    std::vector<Box> group_rects;  // parallel to ResolvedCircuit::groups
    std::vector<Lint> warnings;
    double font_size = kDefaultFontSize;
};

/// The style a cell's primary element is drawn with.
NodeStyle element_style(const Element &element, const StyleSheet &sheet, const EnvOptions &env);

LayoutResult layout(const ResolvedCircuit &circuit, const StyleSheet &sheet, const GeometryConfig &config);
LayoutResult layout(const ResolvedCircuit &circuit, const StyleSheet &sheet);

}  // namespace qtkz
