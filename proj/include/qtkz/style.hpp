#pragma once

// Colors, node style keys, the named global style table and the layered
// resolution that turns them into concrete drawing attributes.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qtkz/length.hpp"
#include "qtkz/syntax.hpp"

namespace qtkz {

struct Color {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
    friend bool operator==(const Color &, const Color &) = default;
};

/// `name`, `name!p` (mixed with white) or `name!p!other`. Throws
/// Error{UnknownColorName, BadPercent}.
Color parse_color(std::string_view spec);

/// `#rrggbb`.
std::string to_hex(const Color &c);

/// A stroke or fill: a color, or nothing at all (`none` / transparent).
struct Paint {
    std::optional<Color> color;
    bool visible() const { return color.has_value(); }
    friend bool operator==(const Paint &, const Paint &) = default;
};

enum class LabelPosition { Default, Above, Below, Left, Right };

enum class Anchor { Center, North, South, East, West, NorthEast, NorthWest, SouthEast, SouthWest, Mid, Base };

struct NodeStyle {
    Paint stroke{Color{0, 0, 0}};
    Paint fill{};
    Length line_width = Length::pt(0.6);
    bool dashed = false;
    bool rounded = false;
    Length corner_radius = Length::pt(4);
    Length inner_xsep = Length::pt(3);
    Length inner_ysep = Length::pt(3);
    Length xshift{};
    Length yshift{};
    Length shorten_start{};
    Length shorten_end{};
    LabelPosition label_position = LabelPosition::Default;
    Anchor anchor = Anchor::Center;
    double rotate_deg = 0.0;
    double font_scale = 1.0;

    friend bool operator==(const NodeStyle &, const NodeStyle &) = default;
};

/// Field-by-field optional overlay of a NodeStyle.
struct NodeStylePartial {
    std::optional<Paint> stroke;
    std::optional<Paint> fill;
    std::optional<Length> line_width;
    std::optional<bool> dashed;
    std::optional<bool> rounded;
    std::optional<Length> corner_radius;
    std::optional<Length> inner_xsep;
    std::optional<Length> inner_ysep;
    std::optional<Length> xshift;
    std::optional<Length> yshift;
    std::optional<Length> shorten_start;
    std::optional<Length> shorten_end;
    std::optional<LabelPosition> label_position;
    std::optional<Anchor> anchor;
    std::optional<double> rotate_deg;
    std::optional<double> font_scale;

    bool empty() const { return *this == NodeStylePartial{}; }
    friend bool operator==(const NodeStylePartial &, const NodeStylePartial &) = default;
};

/// `over` wins wherever it sets a field.
NodeStylePartial merge(const NodeStylePartial &base, const NodeStylePartial &over);
NodeStyle apply(NodeStyle base, const NodeStylePartial &over);

struct ParsedStyle {
    NodeStylePartial style;
    std::vector<std::string> unknown_keys;
};

/// Never fails: keys it cannot interpret (unknown names, bad colors, bad
/// lengths) come back in `unknown_keys`.
ParsedStyle parse_style_keys(const std::vector<KeyValue> &pairs);
ParsedStyle parse_style_keys(std::string_view raw);

/// What a style is being resolved for. Several kinds share a named style.
enum class StyleTarget {
    Gate,
    GateLabel,
    Meter,
    MeterLabel,
    Slice,
    SliceLabel,
    Wave,
    GateInput,
    GateOutput,
    LeftBrace,
    RightBrace,
    Phase,
    OpenPhase,
    PhaseLabel,
    Targ,
    Swap,
    Group,
    GroupLabel,
    Wire,
    StickLabel,
    Trash,
    Push,
    Ebit,
    EbitLabel,
    Arrow,
};

/// Name of the global style governing `target`, or empty when none does.
std::string_view global_style_name(StyleTarget target);

/// Built-in attributes before any global or per-element styling.
NodeStyle builtin_style(StyleTarget target);

/// `thin lines` halves every line width (0.6pt becomes 0.3pt).
inline constexpr double kThinLineFactor = 0.5;

class StyleSheet {
   public:
    /// Seeds every documented global style name with an empty overlay.
    StyleSheet();

    static const std::vector<std::string> &documented_names();

    /// `name/.append style={...}`.
    void append(const std::string &name, const NodeStylePartial &partial);
    const NodeStylePartial *find(const std::string &name) const;
    const std::map<std::string, NodeStylePartial> &named() const { return named_; }

   private:
    std::map<std::string, NodeStylePartial> named_;
};

/// Loads `{"styles": {"operator": {"fill": "red!20"}, "my label": "above"}}`
/// into `sheet`. Values may be a key object or a raw key list. Returns keys
/// that were not understood. Throws Error{BadStylesheet}.
std::vector<std::string> load_stylesheet_json(std::string_view json_text, StyleSheet &sheet);

/// Environment switches that act on every element.
struct GlobalFlags {
    bool thin_lines = false;
    bool transparent = false;
};

/// Layers, lowest first: built-in defaults, the target's named global
/// style, environment flags, per-element overrides.
NodeStyle resolve_style(StyleTarget target, const StyleSheet &sheet, const GlobalFlags &flags,
                        const NodeStylePartial &per_element = {});

}  // namespace qtkz
