#pragma once

// Drawing primitives in paint order and the two serializers.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qtkz/layout.hpp"
#include "qtkz/style.hpp"
#include "qtkz/text.hpp"

namespace qtkz {

/// Paint order, lowest first. Scene primitives never go back down a layer.
enum class Layer { BackgroundGroups, Wires, Links, Glyphs, Slices, ForegroundGroups, Labels };

std::string_view layer_name(Layer layer);

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point &, const Point &) = default;
};

struct DrawStyle {
    std::optional<Color> stroke;
    std::optional<Color> fill;
    double line_width = 0.0;  // units
    bool dashed = false;
    friend bool operator==(const DrawStyle &, const DrawStyle &) = default;
};

struct LinePrim {
    Point p1, p2;
    friend bool operator==(const LinePrim &, const LinePrim &) = default;
};

struct PolylinePrim {
    std::vector<Point> pts;
    bool closed = false;
    friend bool operator==(const PolylinePrim &, const PolylinePrim &) = default;
};

struct RectPrim {
    Box box;
    double corner_radius = 0.0;
    friend bool operator==(const RectPrim &, const RectPrim &) = default;
};

struct CirclePrim {
    Point c;
    double r = 0.0;
    friend bool operator==(const CirclePrim &, const CirclePrim &) = default;
};

/// Angles in degrees, counter-clockwise from +x with y pointing up.
struct ArcPrim {
    Point c;
    double r = 0.0;
    double a0 = 0.0;
    double a1 = 0.0;
    friend bool operator==(const ArcPrim &, const ArcPrim &) = default;
};

/// 'M' and 'L' take one point, 'C' three, 'Z' none.
struct PathSegment {
    char op = 'M';
    std::vector<Point> pts;
    friend bool operator==(const PathSegment &, const PathSegment &) = default;
};

struct PathPrim {
    std::vector<PathSegment> segments;
    friend bool operator==(const PathPrim &, const PathPrim &) = default;
};

/// `pos` is the vertical centre of the text block; `anchor` is start,
/// middle or end. `w`/`h` are the estimated extents before rotation.
struct TextPrim {
    Point pos;
    FormattedText content;
    std::string anchor = "middle";
    double rotate_deg = 0.0;
    double font_size = 0.0;
    double w = 0.0;
    double h = 0.0;
    friend bool operator==(const TextPrim &, const TextPrim &) = default;
};

using Shape = std::variant<LinePrim, PolylinePrim, RectPrim, CirclePrim, ArcPrim, PathPrim, TextPrim>;

std::string_view shape_kind(const Shape &shape);

struct Primitive {
    Layer layer = Layer::Wires;
    std::string role;  // what the shape depicts: wire, double-line, strike, gate, ...
    Shape shape;
    DrawStyle style;
    friend bool operator==(const Primitive &, const Primitive &) = default;
};

struct Scene {
    std::vector<Primitive> primitives;
    double baseline_y = 0.0;
    friend bool operator==(const Scene &, const Scene &) = default;
};

Scene build_scene(const ResolvedCircuit &circuit, const LayoutResult &layout, const StyleSheet &sheet);

/// Bounding box of everything drawn, or nullopt for an empty scene.
std::optional<Box> scene_bounds(const Scene &scene);

/// 1 unit = 0.35 * scale px.
std::string emit_svg(const Scene &scene, double scale = 1.0);
std::string emit_json(const Scene &scene);

inline constexpr double kPxPerUnit = 0.35;

}  // namespace qtkz
